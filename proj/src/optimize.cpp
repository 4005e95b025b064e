#include "odmrpol/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <vector>

#include "odmrpol/kernels.hpp"

namespace odmrpol {

const char* optimize_target_name(OptimizeTarget target) {
    return target == OptimizeTarget::relative_contrast ? "R" : "chi";
}

const char* optimize_constraint_name(OptimizeConstraint c) {
    return c == OptimizeConstraint::experiment_planes ? "planes" : "free";
}

void OptimizeOptions::validate() const {
    if (!(grid_deg > 0.0) || grid_deg > 4.0)
        throw std::invalid_argument("optimize: grid_deg must lie in (0, 4]");
    if (threads < 1) throw std::invalid_argument("optimize: threads must be >= 1");
    if (!(refine_tol_rad > 0.0)) throw std::invalid_argument("optimize: refine_tol_rad must be > 0");
}

namespace {

constexpr double deg = std::numbers::pi / 180.0;

double transverse(const Vec3& axis, const Vec3& dir) {
    const double c = axis.x * dir.x + axis.y * dir.y + axis.z * dir.z;
    return 1.0 - c * c;
}

double objective_from_parts(OptimizeTarget target, double num, double den) {
    return target == OptimizeTarget::relative_contrast ? num / den : num / std::sqrt(den);
}

// Candidate direction sets, stored as structure-of-arrays for the kernels.
struct DirectionSet {
    std::vector<double> x, y, z;
    std::vector<double> theta_rad, phi_rad;  // spherical seed angles per entry

    std::size_t size() const { return x.size(); }
};

Vec3 from_spherical(double theta, double phi) {
    const double st = std::sin(theta);
    return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
}

// Hemisphere grid: theta in [0, 90] degrees inclusive, phi in [0, 360). The
// grids for pitches g, g/2, g/4, ... are nested, so a finer search can never
// report a smaller grid value.
DirectionSet hemisphere_grid(double grid_deg) {
    std::vector<double> thetas;
    for (double t = 0.0; t < 90.0; t += grid_deg) thetas.push_back(t);
    thetas.push_back(90.0);

    std::vector<double> phis;
    for (double p = 0.0; p < 360.0; p += grid_deg) phis.push_back(p);

    DirectionSet set;
    const std::size_t n = thetas.size() * phis.size();
    set.x.reserve(n), set.y.reserve(n), set.z.reserve(n);
    set.theta_rad.reserve(n), set.phi_rad.reserve(n);
    for (double t : thetas) {
        const double theta = t * deg;
        for (double p : phis) {
            const double phi = p * deg;
            const Vec3 v = from_spherical(theta, phi);
            set.x.push_back(v.x);
            set.y.push_back(v.y);
            set.z.push_back(v.z);
            set.theta_rad.push_back(theta);
            set.phi_rad.push_back(phi);
        }
    }
    return set;
}

// In-plane grid: one angle in [0, 180) degrees.
DirectionSet plane_grid(const PolarizationPlane& plane, double grid_deg) {
    DirectionSet set;
    for (double t = 0.0; t < 180.0; t += grid_deg) {
        const double theta = t * deg;
        const Vec3 v = angle_to_vector(plane, theta).vec();
        set.x.push_back(v.x);
        set.y.push_back(v.y);
        set.z.push_back(v.z);
        set.theta_rad.push_back(theta);
        set.phi_rad.push_back(0.0);
    }
    return set;
}

struct GridBest {
    double score = -1.0;
    std::size_t row = 0;
    std::size_t col = 0;
};

// Scan all (row, col) pairs: rows index the laser candidates, columns the
// collection candidates. Each row reduces to one kernel scan; rows are split
// contiguously across threads and merged in row order, so the winner is the
// first maximizer regardless of the thread count.
GridBest scan_pairs(const std::array<std::vector<double>, 4>& laser_weight,
                    const std::array<std::vector<double>, 4>& coll_weight, int fam,
                    OptimizeTarget target, int threads) {
    const auto& table = kernels::active_table();
    const auto scan = target == OptimizeTarget::relative_contrast ? table.best_share
                                                                  : table.best_share_chi;
    const std::size_t n_rows = laser_weight[0].size();
    const std::size_t n_cols = coll_weight[0].size();

    auto scan_rows = [&](std::size_t row_begin, std::size_t row_end, GridBest& best) {
        for (std::size_t row = row_begin; row < row_end; ++row) {
            const double p[4] = {laser_weight[0][row], laser_weight[1][row], laser_weight[2][row],
                                 laser_weight[3][row]};
            const kernels::BestEntry entry =
                scan(coll_weight[0].data(), coll_weight[1].data(), coll_weight[2].data(),
                     coll_weight[3].data(), n_cols, p, fam);
            const double score = objective_from_parts(target, entry.num, entry.den);
            if (score > best.score) best = {score, row, entry.index};
        }
    };

    const std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(threads), n_rows);
    if (n_threads <= 1) {
        GridBest best;
        scan_rows(0, n_rows, best);
        return best;
    }

    std::vector<GridBest> partial(n_threads);
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) {
        const std::size_t begin = n_rows * t / n_threads;
        const std::size_t end = n_rows * (t + 1) / n_threads;
        pool.emplace_back(scan_rows, begin, end, std::ref(partial[t]));
    }
    for (auto& th : pool) th.join();

    GridBest best = partial[0];
    for (std::size_t t = 1; t < n_threads; ++t)
        if (partial[t].score > best.score) best = partial[t];
    return best;
}

double raw_objective(const std::array<NVFamily, 4>& families, int fam, OptimizeTarget target,
                     const Vec3& n_l, const Vec3& n_p) {
    double num = 0.0, den = 0.0;
    for (int j = 0; j < 4; ++j) {
        const auto& axis = families[static_cast<std::size_t>(j)].axis.vec();
        const double w = transverse(axis, n_l) * transverse(axis, n_p);
        den += w;
        if (j == fam) num = w;
    }
    return objective_from_parts(target, num, den);
}

// Coordinate ascent over the seed angles, halving the step until it drops
// below tol. Angles parameterize unit vectors, so no renormalization is
// needed and the objective stays exact.
struct Refined {
    double value;
    Vec3 n_l, n_p;
};

Refined refine_angles(const std::array<NVFamily, 4>& families, int fam, OptimizeTarget target,
                      OptimizeConstraint constraint, std::array<double, 4> angles,
                      double step0_rad, double tol_rad) {
    const bool planes = constraint == OptimizeConstraint::experiment_planes;
    const int n_coords = planes ? 2 : 4;

    auto make_dirs = [&](const std::array<double, 4>& a) {
        if (planes)
            return std::pair<Vec3, Vec3>{angle_to_vector(laser_plane(), a[0]).vec(),
                                         angle_to_vector(collection_plane(), a[1]).vec()};
        return std::pair<Vec3, Vec3>{from_spherical(a[0], a[1]), from_spherical(a[2], a[3])};
    };

    auto eval = [&](const std::array<double, 4>& a) {
        const auto [n_l, n_p] = make_dirs(a);
        return raw_objective(families, fam, target, n_l, n_p);
    };

    double best = eval(angles);
    for (double step = step0_rad; step >= tol_rad; step *= 0.5) {
        bool improved = true;
        while (improved) {
            improved = false;
            for (int c = 0; c < n_coords; ++c) {
                for (double sign : {1.0, -1.0}) {
                    std::array<double, 4> trial = angles;
                    trial[static_cast<std::size_t>(c)] += sign * step;
                    const double v = eval(trial);
                    if (v > best) {
                        best = v;
                        angles = trial;
                        improved = true;
                    }
                }
            }
        }
    }

    const auto [n_l, n_p] = make_dirs(angles);
    return {best, n_l, n_p};
}

}  // namespace

double polarization_objective(const std::array<NVFamily, 4>& families, FamilyLabel family,
                              OptimizeTarget target, const UnitVec3& n_l, const UnitVec3& n_p) {
    return raw_objective(families, static_cast<int>(family), target, n_l.vec(), n_p.vec());
}

double baseline_polarization_value(const std::array<NVFamily, 4>& families, FamilyLabel family,
                                   OptimizeTarget target) {
    return polarization_objective(families, family, target, UnitVec3(0.0, 1.0, 0.0),
                                  UnitVec3(0.0, 0.0, 1.0));
}

double improvement_report(const Optimum& optimum, const FamilyWeights& baseline) {
    const auto fam = static_cast<std::size_t>(optimum.family);
    const double base = optimum.target == OptimizeTarget::relative_contrast
                            ? baseline.relative_contribution[fam]
                            : baseline.chi[fam];
    if (!(base > 0.0))
        throw std::invalid_argument("improvement_report: baseline value must be positive");
    return optimum.value / base;
}

Optimum optimize_polarizations(const std::array<NVFamily, 4>& families, FamilyLabel family,
                               OptimizeTarget target, OptimizeConstraint constraint,
                               const OptimizeOptions& options) {
    options.validate();
    const int fam = static_cast<int>(family);
    const auto& table = kernels::active_table();

    const bool planes = constraint == OptimizeConstraint::experiment_planes;
    const DirectionSet laser_set =
        planes ? plane_grid(laser_plane(), options.grid_deg) : hemisphere_grid(options.grid_deg);
    const DirectionSet coll_set = planes ? plane_grid(collection_plane(), options.grid_deg)
                                         : hemisphere_grid(options.grid_deg);

    std::array<std::vector<double>, 4> laser_weight;
    std::array<std::vector<double>, 4> coll_weight;
    for (int j = 0; j < 4; ++j) {
        const auto& axis = families[static_cast<std::size_t>(j)].axis;
        auto& lw = laser_weight[static_cast<std::size_t>(j)];
        auto& cw = coll_weight[static_cast<std::size_t>(j)];
        lw.resize(laser_set.size());
        cw.resize(coll_set.size());
        table.transverse_weight(laser_set.x.data(), laser_set.y.data(), laser_set.z.data(),
                                laser_set.size(), axis.x(), axis.y(), axis.z(), lw.data());
        table.transverse_weight(coll_set.x.data(), coll_set.y.data(), coll_set.z.data(),
                                coll_set.size(), axis.x(), axis.y(), axis.z(), cw.data());
    }

    const GridBest best = scan_pairs(laser_weight, coll_weight, fam, target, options.threads);

    Optimum out;
    out.target = target;
    out.constraint = constraint;
    out.family = family;
    out.grid_deg = options.grid_deg;
    out.grid_value = best.score;
    out.n_l = {laser_set.x[best.row], laser_set.y[best.row], laser_set.z[best.row]};
    out.n_p = {coll_set.x[best.col], coll_set.y[best.col], coll_set.z[best.col]};
    out.value = best.score;

    if (options.refine) {
        const std::array<double, 4> seed = {laser_set.theta_rad[best.row],
                                            laser_set.phi_rad[best.row],
                                            coll_set.theta_rad[best.col],
                                            coll_set.phi_rad[best.col]};
        std::array<double, 4> angles = seed;
        if (planes) angles = {seed[0], seed[2], 0.0, 0.0};
        const Refined refined = refine_angles(families, fam, target, constraint, angles,
                                              options.grid_deg * deg, options.refine_tol_rad);
        // Refinement uses its own rounding; only adopt a genuine improvement.
        if (refined.value > out.grid_value) {
            out.value = refined.value;
            out.n_l = refined.n_l;
            out.n_p = refined.n_p;
        }
    }
    return out;
}

}  // namespace odmrpol
