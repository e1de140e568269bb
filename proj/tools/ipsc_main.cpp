#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "ipsc/codec.hpp"
#include "ipsc/errors.hpp"
#include "ipsc/eval.hpp"
#include "ipsc/prior.hpp"
#include "ipsc/sampler.hpp"
#include "ipsc/wav.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ipsc::InvalidInput("cannot open file: " + path);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ipsc::InvalidInput("cannot write file: " + path);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

int cmd_encode(const std::string& in, const std::string& out, double bitrate) {
    ipsc::AudioSignal sig = ipsc::read_wav(in);
    ipsc::EncodeResult enc = ipsc::encode(sig, bitrate);
    write_file(out, enc.bytes);
    std::printf("encoded %zu samples at %.3f kb/s (target %.1f), %zu bytes\n",
                sig.samples.size(), enc.realized_kbps, bitrate, enc.bytes.size());
    return kExitOk;
}

struct DecodeArgs {
    std::string in;
    std::string out;
    std::string mode = "legacy";
    std::string prior_path;
    std::uint64_t seed = 0;
    int steps = 1500;
    double eps = 0.5;
    double sigma2_start = 0.0;
    double sigma2_end = -90.0;
    std::string mean = "noisy";
    std::string cov = "noisy";
    double clamp = 5.0;
    int progress = 0;
    bool steps_set = false;
    bool sigma2_end_set = false;
};

int cmd_decode(const DecodeArgs& args) {
    auto bytes = read_file(args.in);
    auto t0 = std::chrono::steady_clock::now();
    ipsc::AudioSignal out;
    ipsc::DecodedStream stream = ipsc::decode_measurement(bytes);

    if (args.mode == "legacy") {
        out = ipsc::decode_legacy(bytes, args.seed);
    } else {
        int steps = args.steps;
        double sigma2_end = args.sigma2_end;
        if (args.mean == "tweedie" && !args.steps_set && !args.sigma2_end_set) {
            // Stability preset for the Tweedie mean.
            steps = 1250;
            sigma2_end = -75.0;
            std::fprintf(stderr, "tweedie preset: steps=1250, sigma2-end=-75 dB\n");
        }
        const std::size_t n = ipsc::Mdct::signal_length(stream.measurement.frames);
        auto prior = ipsc::load_prior(args.prior_path, n);
        ipsc::ConditioningConfig cfg;
        cfg.mean_model =
            args.mean == "tweedie" ? ipsc::MeanModel::kTweedie : ipsc::MeanModel::kNoisy;
        cfg.covariance_model =
            args.cov == "pgdm" ? ipsc::CovarianceModel::kPgdm : ipsc::CovarianceModel::kNoisy;
        cfg.clamp = args.clamp;
        auto schedule = ipsc::make_schedule(steps, args.sigma2_start, sigma2_end, args.eps);
        ipsc::LangevinOptions opts;
        if (args.progress > 0) {
            opts.progress_stride = args.progress;
            opts.progress = [](const ipsc::SamplerProgress& p) {
                std::fprintf(stderr,
                             "step %5d  sigma %.3e  |prior| %.3e  |meas| %.3e  "
                             "consistency %.4f\n",
                             p.step, p.sigma, p.prior_score_norm,
                             p.measurement_score_norm, p.consistency);
            };
        }
        out = ipsc::langevin_sample(stream.measurement, *prior, cfg, schedule, args.seed,
                                    &opts);
    }
    out.sample_rate = stream.info.sample_rate;
    ipsc::write_wav(args.out, out);
    double runtime =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    auto rep = ipsc::consistency_rate(out, stream.measurement);
    std::printf("decoded %zu samples in %.2f s, consistency %.4f (env %.4f, bins %.4f)\n",
                out.samples.size(), runtime, rep.overall, rep.env_rate, rep.bin_rate);
    return kExitOk;
}

int cmd_eval(const std::string& config_path, const std::string& out_path) {
    std::ifstream f(config_path);
    if (!f) throw ipsc::InvalidInput("cannot open config: " + config_path);
    std::stringstream ss;
    ss << f.rdbuf();
    ipsc::EvalConfig cfg = ipsc::parse_eval_config(ss.str());
    auto rows = ipsc::run_matrix(cfg);
    std::string csv = ipsc::eval_csv(rows);
    if (out_path.empty() || out_path == "-") {
        std::fputs(csv.c_str(), stdout);
    } else {
        std::ofstream outf(out_path);
        if (!outf) throw ipsc::InvalidInput("cannot write CSV: " + out_path);
        outf << csv;
        std::printf("wrote %zu cells to %s\n", rows.size(), out_path.c_str());
    }
    int failures = 0;
    for (const auto& r : rows) {
        if (r.failed) {
            ++failures;
            std::fprintf(stderr, "cell failed: clip=%s bitrate=%g decoder=%s: %s\n",
                         r.clip.c_str(), r.bitrate, r.decoder.c_str(), r.error.c_str());
        }
    }
    return failures == 0 ? kExitOk : kExitData;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "ipsc - MDCT perceptual audio codec with a posterior-sampling decoder\n"
        "Audio I/O is 16-bit mono WAV at 22050 Hz. IPSC_THREADS caps parallelism."};
    app.require_subcommand(1);

    std::string in, out;
    double bitrate = 16.0;
    auto* enc = app.add_subcommand("encode", "Encode a WAV file to an .ipsc bitstream");
    enc->add_option("input", in, "input WAV")->required();
    enc->add_option("output", out, "output bitstream")->required();
    enc->add_option("--bitrate", bitrate, "target bitrate in kb/s")
        ->default_val(16.0)
        ->check(CLI::PositiveNumber);

    DecodeArgs dargs;
    auto* dec = app.add_subcommand("decode", "Decode an .ipsc bitstream to WAV");
    dec->add_option("input", dargs.in, "input bitstream")->required();
    dec->add_option("output", dargs.out, "output WAV")->required();
    dec->add_option("--mode", dargs.mode, "legacy | inv")
        ->default_val("legacy")
        ->check(CLI::IsMember({"legacy", "inv"}));
    dec->add_option("--prior", dargs.prior_path, "prior config file (required for inv)");
    dec->add_option("--seed", dargs.seed, "random seed")->default_val(0);
    auto* steps_opt = dec->add_option("--steps", dargs.steps, "Langevin steps");
    steps_opt->default_val(1500);
    dec->add_option("--eps", dargs.eps, "step scale")->default_val(0.5);
    dec->add_option("--sigma2-start", dargs.sigma2_start, "start noise power, dB")
        ->default_val(0.0);
    auto* end_opt = dec->add_option("--sigma2-end", dargs.sigma2_end, "end noise power, dB");
    end_opt->default_val(-90.0);
    dec->add_option("--mean", dargs.mean, "noisy | tweedie")
        ->default_val("noisy")
        ->check(CLI::IsMember({"noisy", "tweedie"}));
    dec->add_option("--cov", dargs.cov, "noisy | pgdm")
        ->default_val("noisy")
        ->check(CLI::IsMember({"noisy", "pgdm"}));
    dec->add_option("--clamp", dargs.clamp, "per-coordinate score clamp (x 1/sigma)")
        ->default_val(5.0);
    dec->add_option("--progress", dargs.progress, "print diagnostics every N steps")
        ->default_val(0);

    std::string eval_config, eval_out;
    auto* ev = app.add_subcommand("eval", "Run a metric matrix from a config file");
    ev->add_option("config", eval_config, "eval config file")->required();
    ev->add_option("--out", eval_out, "output CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*enc) return cmd_encode(in, out, bitrate);
        if (*dec) {
            dargs.steps_set = steps_opt->count() > 0;
            dargs.sigma2_end_set = end_opt->count() > 0;
            if (dargs.mode == "inv" && dargs.prior_path.empty()) {
                std::fprintf(stderr, "error: --mode inv requires --prior\n");
                return kExitUsage;
            }
            return cmd_decode(dargs);
        }
        if (*ev) return cmd_eval(eval_config, eval_out);
    } catch (const ipsc::CapabilityError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const ipsc::NumericalError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitData;
    }
    return kExitUsage;
}
