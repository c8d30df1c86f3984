// Correspondence evaluation (cumulative geodesic-error protocol) and
// texture transfer through a pointwise map.
#pragma once

#include "specreg/fmap.hpp"

#include <algorithm>

namespace specreg {

class EvalError : public std::runtime_error {
public:
    explicit EvalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Per source vertex, the graph-geodesic distance on the target between the
// predicted and true assignments, normalized by sqrt(target surface area).
// Barycentric assignments snap to their heaviest-weight vertex.
inline ScalarField geodesic_error(const PointMap& pred, const PointMap& truth) {
    if (pred.size() != truth.size())
        throw EvalError("geodesic_error: maps have different domains");
    if (pred.source != truth.source || pred.source == nullptr)
        throw EvalError("geodesic_error: maps must share the same target mesh");
    const TriMesh& target = *pred.source;
    double normalizer = std::sqrt(target.total_area());

    // one Dijkstra per distinct true assignment vertex
    std::unordered_map<int, std::vector<int>> by_truth;  // truth vertex -> source ids
    for (int i = 0; i < pred.size(); ++i)
        by_truth[truth.snapped_vertex(i, target)].push_back(i);

    ScalarField err(pred.size());
    for (const auto& [tv, ids] : by_truth) {
        ScalarField dist = dijkstra_geodesic(target, {tv});
        for (int i : ids) err[i] = dist[pred.snapped_vertex(i, target)] / normalizer;
    }
    return err;
}

struct ErrorCurve {
    std::vector<double> thresholds;
    std::vector<double> fractions;
};

// Empirical CDF of the errors at the given ascending thresholds.
inline ErrorCurve error_curve(const ScalarField& errors, const std::vector<double>& thresholds) {
    for (size_t i = 1; i < thresholds.size(); ++i)
        if (thresholds[i] < thresholds[i - 1])
            throw EvalError("error_curve: thresholds must be ascending");
    std::vector<double> sorted(errors.data(), errors.data() + errors.size());
    std::sort(sorted.begin(), sorted.end());
    ErrorCurve curve;
    curve.thresholds = thresholds;
    curve.fractions.reserve(thresholds.size());
    for (double t : thresholds) {
        auto it = std::upper_bound(sorted.begin(), sorted.end(), t);
        curve.fractions.push_back(sorted.empty()
                                      ? 0.0
                                      : double(it - sorted.begin()) / double(sorted.size()));
    }
    return curve;
}

inline void save_error_curve(const ErrorCurve& curve, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw EvalError("cannot write error curve: " + path);
    out << "threshold,fraction\n" << std::setprecision(12);
    for (size_t i = 0; i < curve.thresholds.size(); ++i)
        out << curve.thresholds[i] << ',' << curve.fractions[i] << '\n';
}

// Pull per-vertex UVs from the source through pi (target vertex -> source point).
inline TriMesh transfer_texture(const TriMesh& source, const TriMesh& target,
                                const PointMap& pi) {
    if (!source.has_uv()) throw EvalError("transfer_texture: source mesh has no UVs");
    if (pi.size() != target.vertex_count())
        throw EvalError("transfer_texture: map length does not match target vertex count");
    TriMesh out = target;
    out.uv.resize(target.vertex_count());
    for (int i = 0; i < pi.size(); ++i) {
        if (const int* v = std::get_if<int>(&pi.assignments[i])) {
            out.uv[i] = source.uv[*v];
        } else {
            const BarycentricPoint& bp = std::get<BarycentricPoint>(pi.assignments[i]);
            const Face& f = source.faces[bp.face];
            out.uv[i] = bp.weights[0] * source.uv[f[0]] + bp.weights[1] * source.uv[f[1]] +
                        bp.weights[2] * source.uv[f[2]];
        }
    }
    return out;
}

}  // namespace specreg
