#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "ipsc/audio.hpp"
#include "ipsc/codec.hpp"
#include "ipsc/wav.hpp"

using namespace ipsc;
namespace fs = std::filesystem;

namespace {

std::string cli_bin() {
    const char* bin = std::getenv("IPSC_CLI_BIN");
    REQUIRE(bin != nullptr);
    return bin;
}

fs::path work_dir() {
    static fs::path dir = [] {
        auto p = fs::temp_directory_path() / "ipsc_cli_tests";
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run(const std::string& args) {
    auto out_path = work_dir() / "out.txt";
    std::string cmd = cli_bin() + " " + args + " > " + out_path.string() + " 2>&1";
    int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WEXITSTATUS(status);
    std::ifstream f(out_path);
    r.output.assign(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
    return r;
}

std::string make_silence_wav() {
    auto path = (work_dir() / "silence.wav").string();
    AudioSignal s;
    s.samples.assign(6 * kStride, 0.0);
    write_wav(path, s);
    return path;
}

std::string make_tone_wav(double seconds = 0.15) {
    auto path = (work_dir() / "tone.wav").string();
    AudioSignal s;
    auto n = static_cast<std::size_t>(seconds * kSampleRate) / kStride * kStride;
    s.samples.resize(std::max<std::size_t>(n, 2 * kStride));
    for (std::size_t i = 0; i < s.samples.size(); ++i) {
        s.samples[i] = 0.3 * std::sin(2.0 * M_PI * 440.0 * i / kSampleRate);
    }
    write_wav(path, s);
    return path;
}

std::string write_text(const std::string& name, const std::string& text) {
    auto path = (work_dir() / name).string();
    std::ofstream f(path);
    f << text;
    return path;
}

}  // namespace

TEST_CASE("encode prints a realized bitrate under the target for silence") {
    auto wav = make_silence_wav();
    auto stream = (work_dir() / "silence.ipsc").string();
    auto r = run("encode " + wav + " " + stream + " --bitrate 16");
    CHECK(r.exit_code == 0);
    auto pos = r.output.find(" at ");
    REQUIRE(pos != std::string::npos);
    double realized = std::stod(r.output.substr(pos + 4));
    CHECK(realized <= 16.5);
    CHECK(fs::file_size(stream) > 0);
}

TEST_CASE("encode rejects unsupported sample rates and missing files") {
    auto bad = (work_dir() / "rate44.wav").string();
    AudioSignal s;
    s.samples.assign(2 * kStride, 0.0);
    s.sample_rate = 44100;
    write_wav(bad, s);
    auto r = run("encode " + bad + " " + (work_dir() / "x.ipsc").string());
    CHECK(r.exit_code == 3);
    CHECK(r.output.find("unsupported sample rate") != std::string::npos);

    auto missing = run("encode /nonexistent.wav " + (work_dir() / "y.ipsc").string());
    CHECK(missing.exit_code == 3);
}

TEST_CASE("legacy decode writes the full frame grid") {
    auto wav = make_tone_wav();
    auto stream = (work_dir() / "tone.ipsc").string();
    REQUIRE(run("encode " + wav + " " + stream + " --bitrate 24").exit_code == 0);
    auto out = (work_dir() / "tone_dec.wav").string();
    auto r = run("decode " + stream + " " + out + " --mode legacy --seed 3");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("consistency") != std::string::npos);

    std::ifstream f(stream, std::ios::binary);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());
    auto m = decode_measurement(bytes);
    auto decoded = read_wav(out);
    CHECK(decoded.samples.size() == (m.measurement.frames - 1) * kStride);
}

TEST_CASE("inv decode is deterministic given the seed") {
    auto wav = make_tone_wav(0.1);
    auto stream = (work_dir() / "tiny.ipsc").string();
    REQUIRE(run("encode " + wav + " " + stream + " --bitrate 16").exit_code == 0);
    auto prior = write_text("prior_ar1.conf", "kind = ar1\nrho = 0.8\nvar = 0.05\n");
    auto out1 = (work_dir() / "inv1.wav").string();
    auto out2 = (work_dir() / "inv2.wav").string();
    std::string flags = " --mode inv --prior " + prior + " --seed 11 --steps 40";
    CHECK(run("decode " + stream + " " + out1 + flags).exit_code == 0);
    CHECK(run("decode " + stream + " " + out2 + flags).exit_code == 0);
    std::ifstream a(out1, std::ios::binary), b(out2, std::ios::binary);
    std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(sa == sb);
}

TEST_CASE("inv decode without a prior is a usage error") {
    auto wav = make_tone_wav(0.1);
    auto stream = (work_dir() / "tiny2.ipsc").string();
    REQUIRE(run("encode " + wav + " " + stream).exit_code == 0);
    auto r = run("decode " + stream + " " + (work_dir() / "no.wav").string() + " --mode inv");
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("--prior") != std::string::npos);
}

TEST_CASE("tweedie mean with a vjp-less prior is a capability error") {
    auto wav = make_tone_wav(0.1);
    auto stream = (work_dir() / "tiny3.ipsc").string();
    REQUIRE(run("encode " + wav + " " + stream).exit_code == 0);
    auto prior = write_text("prior_gmm.conf",
                            "kind = gmm\ncomponent = 0.5 -0.1 0.01\ncomponent = 0.5 0.1 0.01\n");
    auto r = run("decode " + stream + " " + (work_dir() / "tw.wav").string() +
                 " --mode inv --prior " + prior + " --mean tweedie --steps 10");
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("vjp") != std::string::npos);
}

TEST_CASE("bad flags give usage exit code") {
    CHECK(run("decode").exit_code == 2);
    CHECK(run("frobnicate x y").exit_code == 2);
}

TEST_CASE("eval runs the bundled smoke config") {
    const char* example = std::getenv("IPSC_EVAL_EXAMPLE");
    REQUIRE(example != nullptr);
    // Shrink the bundled config for test runtime: fewer steps and seeds.
    std::ifstream f(example);
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    auto cfg = write_text("eval_small.conf", text + "\nsteps = 60\nseeds = 1\n"
                                                    "clips = ar1:0.95:0.3:7\nbitrates = 16\n");
    auto csv_path = (work_dir() / "report.csv").string();
    auto r = run("eval " + cfg + " --out " + csv_path);
    CHECK(r.exit_code == 0);
    std::ifstream c(csv_path);
    std::string csv((std::istreambuf_iterator<char>(c)), std::istreambuf_iterator<char>());
    CHECK(csv.rfind("cell,metric,mean,stderr,seeds\n", 0) == 0);
    CHECK(csv.find("decoder=inv,consistency") != std::string::npos);
}

TEST_CASE("eval config errors name the problem") {
    auto empty = write_text("empty.conf", "");
    auto r = run("eval " + empty);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("cell,metric,mean,stderr,seeds") != std::string::npos);

    auto bad = write_text("bad.conf", "clips = sine:440:1\ndecoders = warble\n");
    auto rb = run("eval " + bad);
    CHECK(rb.exit_code == 3);
    CHECK(rb.output.find("decoders") != std::string::npos);
    CHECK(rb.output.find("line 2") != std::string::npos);

    auto worse = write_text("worse.conf", "clips sine\n");
    auto rw = run("eval " + worse);
    CHECK(rw.exit_code == 3);
    CHECK(rw.output.find("line 1") != std::string::npos);
}
