#include "nahmforge/solution_io.hpp"

#include "nahmforge/axial.hpp"
#include "nahmforge/spherical.hpp"

#include <fstream>

namespace nahmforge {

namespace {

std::vector<double> flatten_triple(const NahmTriple& t) {
    const Eigen::Index n = t.dim();
    std::vector<double> out;
    out.reserve(static_cast<size_t>(6 * n * n));
    for (int c = 0; c < 3; ++c)
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
                out.push_back(t[c](i, j).real());
                out.push_back(t[c](i, j).imag());
            }
    return out;
}

NahmTriple unflatten_triple(const std::vector<double>& v, Eigen::Index n) {
    if (static_cast<Eigen::Index>(v.size()) != 6 * n * n)
        throw Error("solution JSON: sample length does not match dim");
    NahmTriple t(n);
    size_t idx = 0;
    for (int c = 0; c < 3; ++c)
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
                t[c](i, j) = Complex(v[idx], v[idx + 1]);
                idx += 2;
            }
    return t;
}

double param_or(const nlohmann::json& params, const std::string& key, double fallback) {
    if (params.contains(key)) return params.at(key).get<double>();
    return fallback;
}

}  // namespace

nlohmann::ordered_json solution_to_json(const NahmSolution& s) {
    nlohmann::ordered_json j;
    j["dim"] = s.dim();
    auto [a, b] = s.domain();
    j["domain"] = {a, b};
    if (s.kind() == SolutionKind::closed_form) {
        if (!s.meta())
            throw Error("solution_to_json: closed-form solution without family metadata");
        j["kind"] = "closed-form";
        j["family"] = s.meta()->family;
        nlohmann::ordered_json params;
        for (const auto& [k, v] : s.meta()->params) params[k] = v;
        j["params"] = params;
        return j;
    }
    j["kind"] = "numeric";
    const std::vector<double>* grid = s.sample_grid();
    if (!grid)
        throw Error("solution_to_json: numeric solution without stored samples; resample first");
    j["grid"] = *grid;
    nlohmann::ordered_json samples = nlohmann::ordered_json::array();
    for (double t : *grid) samples.push_back(flatten_triple(s.eval(t)));
    j["samples"] = std::move(samples);
    return j;
}

NahmSolution solution_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "closed-form") {
        const std::string family = j.at("family").get<std::string>();
        nlohmann::json params = j.contains("params") ? j.at("params") : nlohmann::json::object();
        if (family == "axial-su3")
            return axial_su3_solution(param_or(params, "K", 0.0), param_or(params, "c", 0.0),
                                      param_or(params, "k1", 0.0),
                                      param_or(params, "span", 4.0));
        int n = static_cast<int>(param_or(params, "n", 1.0));
        return closed_form_solution(family_from_name(family, n));
    }
    if (kind == "numeric") {
        std::vector<double> grid = j.at("grid").get<std::vector<double>>();
        Eigen::Index dim = j.at("dim").get<Eigen::Index>();
        std::vector<NahmTriple> samples;
        samples.reserve(grid.size());
        for (const auto& s : j.at("samples"))
            samples.push_back(unflatten_triple(s.get<std::vector<double>>(), dim));
        return make_numeric_solution(std::move(grid), std::move(samples));
    }
    throw Error("solution JSON: unknown kind '" + kind + "'");
}

void save_solution(const NahmSolution& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << solution_to_json(s).dump(2) << "\n";
}

NahmSolution load_solution(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    nlohmann::json j;
    in >> j;
    return solution_from_json(j);
}

NahmSolution resampled_numeric(const NahmSolution& s, const std::vector<double>& grid) {
    std::vector<NahmTriple> samples;
    samples.reserve(grid.size());
    for (double t : grid) samples.push_back(s.eval(t));
    return make_numeric_solution(grid, std::move(samples));
}

}  // namespace nahmforge
