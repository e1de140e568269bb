#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ipsc/audio.hpp"
#include "ipsc/conditioning.hpp"
#include "ipsc/metrics.hpp"

namespace ipsc {

/// Experiment grid: every clip x bitrate x decoder cell is evaluated over all
/// seeds. Parsed from the key-value text format documented in the README.
struct EvalConfig {
    std::vector<std::string> clips;
    std::vector<double> bitrates;
    std::vector<std::string> decoders;  // dec | dec-nofill | inv
    std::vector<std::uint64_t> seeds;
    int steps = 1500;
    double eps = 0.5;
    double sigma2_start_db = 0.0;
    double sigma2_end_db = -90.0;
    double prior_rho = 0.9;
    double prior_var = 0.1;
    MeanModel mean_model = MeanModel::kNoisy;
    CovarianceModel covariance_model = CovarianceModel::kNoisy;
    double clamp = 5.0;
};

EvalConfig parse_eval_config(const std::string& text);

/// Synthetic clip generators:
///   ar1:<rho>:<seconds>:<seed>  sine:<hz>:<seconds>  noise:<seconds>:<seed>
///   wav:<path>
AudioSignal make_clip(const std::string& spec);

struct EvalCellResult {
    std::string clip;
    double bitrate = 0.0;
    std::string decoder;
    int seeds = 0;
    bool failed = false;
    std::string error;
    MetricReport mean;
    MetricReport stderr_of_mean;
};

/// Runs every cell; a failing cell is recorded and the run continues.
/// Deterministic given the config. Cells run in parallel, capped by the
/// IPSC_THREADS environment variable.
std::vector<EvalCellResult> run_matrix(const EvalConfig& cfg);

/// Long-format CSV: header "cell,metric,mean,stderr,seeds".
std::string eval_csv(const std::vector<EvalCellResult>& rows);

}  // namespace ipsc
