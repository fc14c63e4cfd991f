#include "nahmforge/spherical.hpp"

#include <cmath>
#include <mutex>
#include <map>

namespace nahmforge {

namespace {

const GeneratorTriple& cached_irrep(int n) {
    static std::mutex mu;
    static std::map<int, GeneratorTriple> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, irrep_generators(n)).first;
    return it->second;
}

const IntertwinerTriple& cached_intertwiner(int n) {
    static std::mutex mu;
    static std::map<int, IntertwinerTriple> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_intertwiner(n)).first;
    return it->second;
}

void check_shape(const ChainSpec& spec, const ChainProfile& p, const char* where) {
    if (static_cast<int>(p.f.size()) != spec.f_count() ||
        static_cast<int>(p.g.size()) != spec.k)
        throw ShapeMismatchError(std::string(where) + ": profile shape does not match spec");
}

}  // namespace

std::vector<int> ChainSpec::dims() const {
    std::vector<int> d;
    for (int a = k; a >= 0; --a) d.push_back(n + 2 * a);
    return d;
}

Eigen::Index ChainSpec::total_dim() const {
    Eigen::Index total = 0;
    for (int d : dims()) total += d;
    return total;
}

ChainProfile operator+(const ChainProfile& a, const ChainProfile& b) {
    ChainProfile c = a;
    for (size_t i = 0; i < c.f.size(); ++i) c.f[i] += b.f[i];
    for (size_t i = 0; i < c.g.size(); ++i) c.g[i] += b.g[i];
    return c;
}

ChainProfile operator-(const ChainProfile& a, const ChainProfile& b) {
    ChainProfile c = a;
    for (size_t i = 0; i < c.f.size(); ++i) c.f[i] -= b.f[i];
    for (size_t i = 0; i < c.g.size(); ++i) c.g[i] -= b.g[i];
    return c;
}

ChainProfile operator*(double s, const ChainProfile& a) {
    ChainProfile c = a;
    for (auto& v : c.f) v *= s;
    for (auto& v : c.g) v *= s;
    return c;
}

double profile_distance(const ChainProfile& a, const ChainProfile& b) {
    double worst = 0.0;
    for (size_t i = 0; i < a.f.size(); ++i) worst = std::max(worst, std::abs(a.f[i] - b.f[i]));
    for (size_t i = 0; i < a.g.size(); ++i) worst = std::max(worst, std::abs(a.g[i] - b.g[i]));
    return worst;
}

double check_spherical(const NahmTriple& t, const GeneratorTriple& y) {
    if (t.dim() != y.dim()) throw Error("check_spherical: dimension mismatch");
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            Mat r = commutator(y[i], t[j]);
            for (int k = 0; k < 3; ++k)
                if (int e = levi_civita(i, j, k); e != 0) r -= static_cast<double>(e) * t[k];
            worst = std::max(worst, r.norm());
        }
    return worst;
}

GeneratorTriple chain_generators(const ChainSpec& spec) {
    std::vector<GeneratorTriple> parts;
    for (int d : spec.dims()) parts.push_back(cached_irrep(d));
    return direct_sum(parts);
}

NahmTriple build_chain(const ChainSpec& spec, const ChainProfile& p) {
    check_shape(spec, p, "build_chain");
    const auto dims = spec.dims();
    const Eigen::Index total = spec.total_dim();
    std::vector<Eigen::Index> offset(dims.size() + 1, 0);
    for (size_t j = 0; j < dims.size(); ++j) offset[j + 1] = offset[j] + dims[j];

    NahmTriple t(total);
    for (int i = 0; i < 3; ++i) {
        // Diagonal blocks: block j carries f_a with a = k - j.
        for (size_t j = 0; j < dims.size(); ++j) {
            int a = spec.k - static_cast<int>(j);
            if (a < spec.f_min()) continue;  // absent f_0 for n = 1 (zero generator anyway)
            double fa = p.f[static_cast<size_t>(a - spec.f_min())];
            t[i].block(offset[j], offset[j], dims[j], dims[j]) = fa * cached_irrep(dims[j])[i];
        }
        // Couplings: g_a joins blocks j = k-a-1 (dim n+2a+2) and j+1 (dim n+2a).
        for (int a = 0; a < spec.k; ++a) {
            int j = spec.k - a - 1;
            const Mat& b = cached_intertwiner(spec.n + 2 * a)[i];
            double ga = p.g[static_cast<size_t>(a)];
            t[i].block(offset[j], offset[j + 1], dims[j], dims[j + 1]) = ga * b;
            t[i].block(offset[j + 1], offset[j], dims[j + 1], dims[j]) = -ga * b.adjoint();
        }
    }
    return t;
}

ChainProfile chain_rhs(const ChainSpec& spec, const ChainProfile& p) {
    check_shape(spec, p, "chain_rhs");
    const int n = spec.n, k = spec.k;
    auto fval = [&](int a) -> double {
        return a < spec.f_min() ? 0.0 : p.f[static_cast<size_t>(a - spec.f_min())];
    };
    auto gval = [&](int a) -> double {
        return (a < 0 || a >= k) ? 0.0 : p.g[static_cast<size_t>(a)];
    };
    ChainProfile d;
    d.f.resize(p.f.size());
    d.g.resize(p.g.size());
    for (int a = spec.f_min(); a <= k; ++a) {
        double fa = fval(a), gm = gval(a - 1), gp = gval(a);
        double m = n + 2 * a;
        d.f[static_cast<size_t>(a - spec.f_min())] =
            fa * fa + (2.0 / (m - 1)) * gm * gm - (2.0 * (m + 2) / (m * (m + 1))) * gp * gp;
    }
    for (int a = 0; a < k; ++a) {
        double m = n + 2 * a;
        d.g[static_cast<size_t>(a)] =
            (0.5 * (m + 3) * fval(a + 1) - 0.5 * (m - 1) * fval(a)) * gval(a);
    }
    return d;
}

ChainSpec ClosedFormFamily::spec() const {
    switch (tag) {
        case Family::three_plus_one: return {1, 1};
        case Family::five_three_one: return {1, 2};
        case Family::n_plus_2_plus_n: return {n, 1};
    }
    throw Error("ClosedFormFamily: bad tag");
}

std::string ClosedFormFamily::name() const {
    switch (tag) {
        case Family::three_plus_one: return "3+1";
        case Family::five_three_one: return "5+3+1";
        case Family::n_plus_2_plus_n:
            return std::to_string(n + 2) + "+" + std::to_string(n);
    }
    throw Error("ClosedFormFamily: bad tag");
}

int ClosedFormFamily::monopole_rank() const {
    switch (tag) {
        case Family::three_plus_one: return 4;
        case Family::five_three_one: return 6;
        case Family::n_plus_2_plus_n: return n + 3;
    }
    throw Error("ClosedFormFamily: bad tag");
}

ClosedFormFamily family_from_name(const std::string& name, int n) {
    if (name == "3+1") return {Family::three_plus_one, 1};
    if (name == "5+3+1") return {Family::five_three_one, 1};
    if (name == "(n+2)+n") return {Family::n_plus_2_plus_n, n};
    // Accept concrete names like "4+2", "5+3", ...
    auto plus = name.find('+');
    if (plus != std::string::npos) {
        try {
            int hi = std::stoi(name.substr(0, plus));
            int lo = std::stoi(name.substr(plus + 1));
            if (hi == lo + 2 && lo >= 2) return {Family::n_plus_2_plus_n, lo};
        } catch (const std::exception&) {
        }
    }
    throw Error("unknown family name: " + name);
}

ChainProfile closed_form(const ClosedFormFamily& fam, double t) {
    if (!(std::abs(t) < 1.0)) throw DomainError("closed_form: |t| must be < 1");
    const double u = 1.0 / (t * t - 1.0);
    ChainProfile p;
    switch (fam.tag) {
        case Family::three_plus_one:
            p.f = {-t * u};           // t/(1-t^2)
            p.g = {-u};               // 1/(1-t^2)
            return p;
        case Family::five_three_one:
            p.f = {-t * u, -t * u};
            p.g = {std::sqrt(8.0 / 3.0) * u, std::sqrt(2.0) * u};
            return p;
        case Family::n_plus_2_plus_n: {
            double n = fam.n;
            p.f = {-((n + 1) * t + (n + 3)) * u / (n + 1),    // f^- (bottom block)
                   -((n + 1) * t + (n - 1)) * u / (n + 1)};   // f^+ (top block)
            p.g = {std::sqrt(2.0 * n / (n + 1)) * u};
            return p;
        }
    }
    throw Error("closed_form: bad tag");
}

ChainProfile closed_form_derivative(const ClosedFormFamily& fam, double t) {
    if (!(std::abs(t) < 1.0)) throw DomainError("closed_form_derivative: |t| must be < 1");
    const double u = 1.0 / (t * t - 1.0);
    const double du = -2.0 * t * u * u;
    ChainProfile p;
    const double df_t = -u - t * du;  // d/dt of -t*u
    switch (fam.tag) {
        case Family::three_plus_one:
            p.f = {df_t};
            p.g = {-du};
            return p;
        case Family::five_three_one:
            p.f = {df_t, df_t};
            p.g = {std::sqrt(8.0 / 3.0) * du, std::sqrt(2.0) * du};
            return p;
        case Family::n_plus_2_plus_n: {
            double n = fam.n;
            p.f = {(-(n + 1) * u - ((n + 1) * t + (n + 3)) * du) / (n + 1),
                   (-(n + 1) * u - ((n + 1) * t + (n - 1)) * du) / (n + 1)};
            p.g = {std::sqrt(2.0 * n / (n + 1)) * du};
            return p;
        }
    }
    throw Error("closed_form_derivative: bad tag");
}

ChainProfile closed_form_residues(const ClosedFormFamily& fam, int endpoint) {
    if (endpoint != 1 && endpoint != -1)
        throw DomainError("closed_form_residues: endpoint must be +1 or -1");
    const double e = endpoint;
    // Res of u = 1/(t^2-1) at +-1 is +-1/2.
    const double ru = 0.5 * e;
    ChainProfile p;
    switch (fam.tag) {
        case Family::three_plus_one:
            // f = -t u, g = -u
            p.f = {-e * ru};
            p.g = {-ru};
            return p;
        case Family::five_three_one:
            p.f = {-e * ru, -e * ru};
            p.g = {std::sqrt(8.0 / 3.0) * ru, std::sqrt(2.0) * ru};
            return p;
        case Family::n_plus_2_plus_n: {
            double n = fam.n;
            p.f = {-((n + 1) * e + (n + 3)) * ru / (n + 1),
                   -((n + 1) * e + (n - 1)) * ru / (n + 1)};
            p.g = {std::sqrt(2.0 * n / (n + 1)) * ru};
            return p;
        }
    }
    throw Error("closed_form_residues: bad tag");
}

NahmSolution closed_form_solution(const ClosedFormFamily& fam) {
    ChainSpec spec = fam.spec();
    // Warm the caches so evaluation closures never race on first use.
    build_chain(spec, closed_form(fam, 0.0));

    auto eval = [fam, spec](double t) { return build_chain(spec, closed_form(fam, t)); };
    auto deriv = [fam, spec](double t) {
        return build_chain(spec, closed_form_derivative(fam, t));
    };
    auto residue = [fam, spec](double endpoint) {
        return build_chain(spec, closed_form_residues(fam, endpoint > 0 ? 1 : -1));
    };
    SolutionMeta meta;
    meta.family = fam.tag == Family::n_plus_2_plus_n ? "(n+2)+n" : fam.name();
    meta.params = {{"n", static_cast<double>(spec.n)}, {"k", static_cast<double>(spec.k)}};
    return make_closed_form_solution(spec.total_dim(), -1.0, 1.0, eval, deriv, residue,
                                     std::move(meta));
}

int trivial_summand_count(int m, int n) {
    if (m < 1 || n < 1) throw DomainError("trivial_summand_count: dims must be >= 1");
    if (m == n && m >= 2) return 1;
    if (std::abs(m - n) == 2) return 1;
    return 0;
}

std::vector<std::vector<int>> irreducible_components(const ChainSpec& spec,
                                                     const ChainProfile& p) {
    check_shape(spec, p, "irreducible_components");
    std::vector<std::vector<int>> comps;
    std::vector<int> cur{0};
    for (int j = 0; j < spec.k; ++j) {
        int a = spec.k - j - 1;  // coupling between blocks j and j+1
        if (std::abs(p.g[static_cast<size_t>(a)]) > 1e-12) {
            cur.push_back(j + 1);
        } else {
            comps.push_back(cur);
            cur = {j + 1};
        }
    }
    comps.push_back(cur);
    return comps;
}

}  // namespace nahmforge
