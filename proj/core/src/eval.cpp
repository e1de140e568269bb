#include "ipsc/eval.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "ipsc/codec.hpp"
#include "ipsc/errors.hpp"
#include "ipsc/prior.hpp"
#include "ipsc/rng.hpp"
#include "ipsc/sampler.hpp"
#include "ipsc/wav.hpp"

namespace ipsc {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

std::vector<std::string> parse_list(const std::string& value) {
    std::vector<std::string> items;
    for (auto& piece : split(value, ',')) {
        auto t = trim(piece);
        if (!t.empty()) items.push_back(t);
    }
    return items;
}

int thread_cap() {
    int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("IPSC_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return std::min(v, hw);
    }
    return hw;
}

}  // namespace

EvalConfig parse_eval_config(const std::string& text) {
    EvalConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line_no);
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "clips") {
                cfg.clips = parse_list(value);
            } else if (key == "bitrates") {
                for (auto& v : parse_list(value)) cfg.bitrates.push_back(std::stod(v));
            } else if (key == "decoders") {
                for (auto& v : parse_list(value)) {
                    if (v != "dec" && v != "dec-nofill" && v != "inv") {
                        throw ConfigError("decoders: unknown decoder '" + v + "'", line_no);
                    }
                    cfg.decoders.push_back(v);
                }
            } else if (key == "seeds") {
                for (auto& v : parse_list(value)) {
                    cfg.seeds.push_back(static_cast<std::uint64_t>(std::stoull(v)));
                }
            } else if (key == "steps") {
                cfg.steps = std::stoi(value);
            } else if (key == "eps") {
                cfg.eps = std::stod(value);
            } else if (key == "sigma2_start_db") {
                cfg.sigma2_start_db = std::stod(value);
            } else if (key == "sigma2_end_db") {
                cfg.sigma2_end_db = std::stod(value);
            } else if (key == "prior") {
                std::istringstream ps(value);
                std::string kind;
                ps >> kind;
                if (kind != "ar1" || !(ps >> cfg.prior_rho >> cfg.prior_var)) {
                    throw ConfigError("prior: expected 'ar1 <rho> <var>'", line_no);
                }
            } else if (key == "mean_model") {
                if (value == "noisy") cfg.mean_model = MeanModel::kNoisy;
                else if (value == "tweedie") cfg.mean_model = MeanModel::kTweedie;
                else throw ConfigError("mean_model: unknown value '" + value + "'", line_no);
            } else if (key == "cov_model") {
                if (value == "noisy") cfg.covariance_model = CovarianceModel::kNoisy;
                else if (value == "pgdm") cfg.covariance_model = CovarianceModel::kPgdm;
                else throw ConfigError("cov_model: unknown value '" + value + "'", line_no);
            } else if (key == "clamp") {
                cfg.clamp = std::stod(value);
            } else {
                throw ConfigError("unknown key '" + key + "'", line_no);
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError("cannot parse value for '" + key + "'", line_no);
        }
    }
    return cfg;
}

AudioSignal make_clip(const std::string& spec) {
    auto parts = split(spec, ':');
    const std::string& kind = parts[0];
    auto need = [&](std::size_t n) {
        if (parts.size() < n + 1) {
            throw InvalidInput("clip '" + spec + "': expected " + std::to_string(n) +
                               " parameters");
        }
    };
    if (kind == "ar1") {
        need(3);
        double rho = std::stod(parts[1]);
        double seconds = std::stod(parts[2]);
        auto seed = static_cast<std::uint64_t>(std::stoull(parts[3]));
        auto n = static_cast<std::size_t>(seconds * kSampleRate) / kStride * kStride;
        GaussianProcessPrior gen(std::max<std::size_t>(n, 2 * kStride), rho, 0.05);
        AudioSignal s;
        s.samples = gen.sample(seed);
        return s;
    }
    if (kind == "sine") {
        need(2);
        double hz = std::stod(parts[1]);
        double seconds = std::stod(parts[2]);
        double amp = parts.size() > 3 ? std::stod(parts[3]) : 0.4;
        auto n = static_cast<std::size_t>(seconds * kSampleRate) / kStride * kStride;
        AudioSignal s;
        s.samples.resize(std::max<std::size_t>(n, 2 * kStride));
        for (std::size_t i = 0; i < s.samples.size(); ++i) {
            s.samples[i] = amp * std::sin(2.0 * M_PI * hz * i / kSampleRate);
        }
        return s;
    }
    if (kind == "noise") {
        need(2);
        double seconds = std::stod(parts[1]);
        auto seed = static_cast<std::uint64_t>(std::stoull(parts[2]));
        double amp = parts.size() > 3 ? std::stod(parts[3]) : 0.2;
        auto n = static_cast<std::size_t>(seconds * kSampleRate) / kStride * kStride;
        Rng rng(seed);
        AudioSignal s;
        s.samples.resize(std::max<std::size_t>(n, 2 * kStride));
        for (auto& v : s.samples) v = amp * rng.normal();
        return s;
    }
    if (kind == "wav") {
        need(1);
        return read_wav(parts[1]);
    }
    throw InvalidInput("clip '" + spec + "': unknown generator '" + kind + "'");
}

namespace {

MetricReport evaluate_one(const AudioSignal& reference, const EncodeResult& enc,
                          const EvalConfig& cfg, const std::string& decoder,
                          std::uint64_t seed) {
    AudioSignal out;
    if (decoder == "dec") {
        out = decode_legacy(enc.bytes, seed);
    } else if (decoder == "dec-nofill") {
        out = decode_legacy(enc.bytes, seed, /*noise_fill=*/false);
    } else {
        const std::size_t n = Mdct::signal_length(enc.measurement.frames);
        GaussianProcessPrior prior(n, cfg.prior_rho, cfg.prior_var);
        ConditioningConfig ccfg;
        ccfg.mean_model = cfg.mean_model;
        ccfg.covariance_model = cfg.covariance_model;
        ccfg.clamp = cfg.clamp;
        auto sched = make_schedule(cfg.steps, cfg.sigma2_start_db, cfg.sigma2_end_db, cfg.eps);
        out = langevin_sample(enc.measurement, prior, ccfg, sched, seed);
    }
    MetricReport r;
    r.snr_db = snr(reference, out);
    r.band_lsd_db = band_lsd(reference, out);
    r.consistency = consistency_rate(out, enc.measurement).overall;
    r.bitrate_kbps = enc.realized_kbps;
    return r;
}

}  // namespace

std::vector<EvalCellResult> run_matrix(const EvalConfig& cfg) {
    struct Job {
        std::string clip;
        double bitrate;
        std::string decoder;
    };
    std::vector<Job> jobs;
    for (const auto& clip : cfg.clips) {
        for (double rate : cfg.bitrates) {
            for (const auto& dec : cfg.decoders) jobs.push_back({clip, rate, dec});
        }
    }
    std::vector<EvalCellResult> results(jobs.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            const Job& job = jobs[i];
            EvalCellResult& res = results[i];
            res.clip = job.clip;
            res.bitrate = job.bitrate;
            res.decoder = job.decoder;
            res.seeds = static_cast<int>(cfg.seeds.size());
            try {
                AudioSignal clip = pad_to_stride(make_clip(job.clip));
                EncodeResult enc = encode(clip, job.bitrate);
                std::vector<MetricReport> per_seed;
                per_seed.reserve(cfg.seeds.size());
                for (auto seed : cfg.seeds) {
                    per_seed.push_back(evaluate_one(clip, enc, cfg, job.decoder, seed));
                }
                auto stat = [&](auto member) {
                    double m = 0.0;
                    for (const auto& r : per_seed) m += r.*member;
                    m /= per_seed.empty() ? 1.0 : per_seed.size();
                    double v = 0.0;
                    for (const auto& r : per_seed) v += (r.*member - m) * (r.*member - m);
                    double se = per_seed.size() > 1
                                    ? std::sqrt(v / (per_seed.size() - 1) /
                                                static_cast<double>(per_seed.size()))
                                    : 0.0;
                    return std::pair<double, double>{m, se};
                };
                if (per_seed.empty()) {
                    res.failed = true;
                    res.error = "no seeds";
                    continue;
                }
                std::tie(res.mean.snr_db, res.stderr_of_mean.snr_db) =
                    stat(&MetricReport::snr_db);
                std::tie(res.mean.band_lsd_db, res.stderr_of_mean.band_lsd_db) =
                    stat(&MetricReport::band_lsd_db);
                std::tie(res.mean.consistency, res.stderr_of_mean.consistency) =
                    stat(&MetricReport::consistency);
                std::tie(res.mean.bitrate_kbps, res.stderr_of_mean.bitrate_kbps) =
                    stat(&MetricReport::bitrate_kbps);
            } catch (const std::exception& e) {
                res.failed = true;
                res.error = e.what();
            }
        }
    };

    int threads = std::max(1, std::min(thread_cap(), static_cast<int>(jobs.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return results;
}

std::string eval_csv(const std::vector<EvalCellResult>& rows) {
    std::ostringstream out;
    out << "cell,metric,mean,stderr,seeds\n";
    out.precision(10);
    for (const auto& r : rows) {
        std::string cell =
            "clip=" + r.clip + ";bitrate=" + std::to_string(r.bitrate) + ";decoder=" + r.decoder;
        if (r.failed) {
            out << cell << ",error,nan,nan," << r.seeds << "\n";
            continue;
        }
        auto emit = [&](const char* name, double mean, double se) {
            out << cell << "," << name << "," << mean << "," << se << "," << r.seeds << "\n";
        };
        emit("snr_db", r.mean.snr_db, r.stderr_of_mean.snr_db);
        emit("band_lsd_db", r.mean.band_lsd_db, r.stderr_of_mean.band_lsd_db);
        emit("consistency", r.mean.consistency, r.stderr_of_mean.consistency);
        emit("bitrate_kbps", r.mean.bitrate_kbps, r.stderr_of_mean.bitrate_kbps);
    }
    return out.str();
}

}  // namespace ipsc
