#pragma once

// Declarative run configuration (JSON), command drivers, and report output.
// Exit-code contract: 0 success, 1 invalid config / usage, 2 certified
// assumption failure, 3 numerical failure.

#include "pbvp/certificates.hpp"
#include "pbvp/model.hpp"
#include "pbvp/simple_iteration.hpp"

#include <string>

namespace pbvp {

enum class Method { kSimple, kNewtonModified, kNewtonClassical };

Method method_from_string(const std::string& s);
const char* to_string(Method m);

struct RunConfig {
    SystemModel model;
    ControlSchedule schedule;
    BoundaryCondition bc;
    int n_g = 1000;
    Method method = Method::kSimple;
    int n_iter = 9;
    std::optional<double> tol;
    bool flow_warm_start = false;  // initial iterate from dense integration
    bool enforce_domain = true;
    bool oracle = false;
    bool certificate = false;
    CertifyOptions certify_opts;
    std::string out_dir = ".";
    unsigned seed = 0;
    std::string echo;  // the normalized config document, embedded in reports
};

/// Parses and validates a config document; unknown keys are rejected.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text);

struct CliOverrides {
    std::optional<int> n_g;
    std::optional<int> n_iter;
    std::optional<std::string> method;
    std::optional<std::string> out_dir;
    bool oracle = false;
    std::optional<unsigned> seed;
};

int cmd_solve(RunConfig config, const CliOverrides& overrides);
int cmd_certify(RunConfig config, const CliOverrides& overrides);
/// which: "table1" or "figure1".
int cmd_bench(const std::string& which, const CliOverrides& overrides);

}  // namespace pbvp
