#include "pbvp/simple_iteration.hpp"

#include <sstream>

namespace pbvp {

IterationResult solve_simple(const SystemModel& model, const BoundaryCondition& bc,
                             const ControlSchedule& schedule, const Grid& grid,
                             const SolveOptions& opts) {
    if (schedule.tau != grid.tau)
        throw DomainError("solve_simple: schedule and grid periods differ");
    const MatExpCache cache = build_matexp_cache(model.A, grid);

    Trajectory x = opts.initial ? *opts.initial : zero_trajectory(grid, model.n);
    if (!(x.grid == grid)) throw DomainError("solve_simple: initial trajectory grid mismatch");
    if (opts.enforce_domain)
        for (int j = 0; j < grid.nodes(); ++j)
            require_in_domain(model, x.node(j), "solve_simple: initial trajectory");
    x.iteration = 0;

    IterationResult result;
    std::optional<double> prev_step;
    for (int k = 0; ; ++k) {
        Trajectory xn;
        try {
            xn = apply_F(model, bc, schedule, x, grid, cache, opts.enforce_domain);
        } catch (const DomainError& e) {
            std::ostringstream os;
            os << "solve_simple: iteration " << (k + 1) << ": " << e.what();
            throw DomainError(os.str());
        }
        ResidualReport rep;
        rep.d = xn.sup_distance(x);
        rep.periodicity_gap = (x.node(0) - x.node(grid.n_g)).norm();
        rep.iterate_gap = prev_step;
        result.history.push_back(rep);

        if (k == opts.n_iter) break;
        prev_step = rep.d;  // |x^{k+1} - x^k| for the next entry
        x = std::move(xn);
        result.iterations_run = k + 1;
        if (opts.tol && *prev_step <= *opts.tol) {
            result.converged = true;
            // diagnostic entry for the accepted iterate
            Trajectory xv = apply_F(model, bc, schedule, x, grid, cache, opts.enforce_domain);
            ResidualReport last;
            last.d = xv.sup_distance(x);
            last.periodicity_gap = (x.node(0) - x.node(grid.n_g)).norm();
            last.iterate_gap = prev_step;
            result.history.push_back(last);
            break;
        }
    }
    result.final = std::move(x);
    return result;
}

}  // namespace pbvp
