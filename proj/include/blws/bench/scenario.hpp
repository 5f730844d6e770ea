#ifndef BLWS_BENCH_SCENARIO_HPP
#define BLWS_BENCH_SCENARIO_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

#include "blws/bench/report.hpp"
#include "blws/solvers.hpp"
#include "blws/svt.hpp"
#include "blws/synth.hpp"

namespace blws::bench {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
    std::string problem = "rpca";   ///< rpca | mc
    Index m = 500;
    double rank_frac = 0.1;         ///< rpca: rank(A) = round(rank_frac * m)
    double corrupt_frac = 0.1;      ///< rpca: nnz(E) = round(corrupt_frac * m^2)
    Index r = 10;                   ///< mc: rank of A
    double ratio = 6.0;             ///< mc: s / d_r
    std::string backend = "blws";   ///< full | lanczos | blws
    Index k = 2;                    ///< blws block steps
    std::uint64_t seed = 1;
    double tol = 0;                 ///< outer tolerance; 0 = solver default
    double ritz_tol = 1e-8;         ///< lanczos backend tolerance
    Index max_iter = 0;             ///< 0 = solver default
    std::string out;                ///< output path; empty = stdout
    std::string format = "csv";     ///< csv | markdown
    std::string dump_dir;           ///< export the generated instance here
    int jobs = 1;                   ///< repro worker slots

    void validate() const {
        if (problem != "rpca" && problem != "mc")
            throw ConfigError("problem must be rpca or mc");
        if (m < 4) throw ConfigError("m too small");
        if (backend != "full" && backend != "lanczos" && backend != "blws")
            throw ConfigError("backend must be full, lanczos or blws");
        if (k < 1) throw ConfigError("k must be >= 1");
        if (problem == "rpca") {
            if (!(rank_frac > 0 && rank_frac < 1)) throw ConfigError("rank-frac outside (0,1)");
            if (!(corrupt_frac >= 0 && corrupt_frac < 1))
                throw ConfigError("corrupt-frac outside [0,1)");
        } else {
            if (r < 1 || r > m) throw ConfigError("r outside [1,m]");
            if (!(ratio > 0)) throw ConfigError("ratio must be positive");
            if (mc_sample_count(m, r, ratio) > static_cast<std::int64_t>(m) * m)
                throw ConfigError("ratio samples more entries than the matrix has");
        }
        if (tol < 0) throw ConfigError("tol must be nonnegative");
        if (max_iter < 0) throw ConfigError("max-iter must be nonnegative");
        if (format != "csv" && format != "markdown")
            throw ConfigError("format must be csv or markdown");
        if (jobs < 1) throw ConfigError("jobs must be >= 1");
    }
};

inline SvdBackend<double> make_backend(const ScenarioConfig& cfg) {
    SvdBackend<double>::Options o;
    o.block_steps = cfg.k;
    o.ritz_tol = cfg.ritz_tol;
    o.seed = cfg.seed ^ 0x5bdbeefULL;
    if (cfg.backend == "full") return SvdBackend<double>::exact_full();
    if (cfg.backend == "lanczos") return SvdBackend<double>::lanczos(o);
    return SvdBackend<double>::blws(o);
}

inline std::string method_name(const ScenarioConfig& cfg) {
    if (cfg.problem == "rpca") {
        if (cfg.backend == "blws") return "BLWS-ADM";
        if (cfg.backend == "full") return "ADM-full";
        return "ADM";
    }
    if (cfg.backend == "blws") return "BLWS-SVT";
    if (cfg.backend == "full") return "SVT-full";
    return "SVT";
}

/// Generates the scenario's instance, runs the configured solver/backend,
/// and fills a report row. Deterministic except for the timing fields.
inline ReportRow run_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    ReportRow row;
    row.m = cfg.m;
    row.method = method_name(cfg);

    SvdBackend<double> backend = make_backend(cfg);
    if (cfg.problem == "rpca") {
        row.problem = ProblemKind::Rpca;
        auto inst = gen_rpca<double>(cfg.m, cfg.rank_frac, cfg.corrupt_frac, cfg.seed);
        if (!cfg.dump_dir.empty()) export_instance(inst, cfg.dump_dir);
        RpcaProblem<double> prob{inst.d, 0};
        RpcaOptions<double> opts;
        if (cfg.tol > 0) opts.tol_outer = cfg.tol;
        if (cfg.max_iter > 0) opts.max_iter = cfg.max_iter;
        opts.truth = &inst.a_true;
        auto sol = rpca_adm(prob, backend, opts);
        row.rel_err = sol.stats.rel_err;
        row.rank_hat = sol.stats.rank_hat;
        row.e_l0 = sol.stats.e_l0;
        row.iters = sol.stats.iterations;
        row.time_s = sol.stats.wall_time_s;
        row.matvecs = sol.stats.matvec_count;
        row.converged = sol.stats.converged;
    } else {
        row.problem = ProblemKind::Mc;
        auto inst = gen_mc<double>(cfg.m, cfg.r, cfg.ratio, cfg.seed);
        if (!cfg.dump_dir.empty()) export_instance(inst, cfg.dump_dir);
        McProblem<double> prob{inst.observed, 0, 0};
        McOptions<double> opts;
        if (cfg.tol > 0) opts.tol_outer = cfg.tol;
        if (cfg.max_iter > 0) opts.max_iter = cfg.max_iter;
        opts.truth_ml = &inst.ml;
        opts.truth_mr = &inst.mr;
        auto sol = mc_svt(prob, backend, opts);
        row.r = cfg.r;
        row.s_dr = cfg.ratio;
        row.s_m2 = static_cast<double>(inst.sample_count) /
                   (static_cast<double>(cfg.m) * static_cast<double>(cfg.m));
        row.rel_err = sol.stats.rel_err;
        row.rank_hat = sol.stats.rank_hat;
        row.iters = sol.stats.iterations;
        row.time_s = sol.stats.wall_time_s;
        row.matvecs = sol.stats.matvec_count;
        row.converged = sol.stats.converged;
    }
    return row;
}

}  // namespace blws::bench

#endif
