#include "nahmforge/so3.hpp"

#include "nahmforge/linalg.hpp"

#include <cmath>
#include <sstream>

namespace nahmforge {

GeneratorTriple irrep_generators(int n) {
    if (n < 1) throw Error("irrep_generators: n must be >= 1");
    const double s = 0.5 * (n - 1);
    Mat j3 = Mat::Zero(n, n), jp = Mat::Zero(n, n);
    for (int k = 0; k < n; ++k) j3(k, k) = s - k;
    // Raising operator in the weight basis e_k = |s - k>.
    for (int k = 1; k < n; ++k) jp(k - 1, k) = std::sqrt(static_cast<double>(k) * (n - k));
    Mat jm = jp.adjoint();
    Mat j1 = 0.5 * (jp + jm);
    Mat j2 = (jp - jm) / (2.0 * I);
    GeneratorTriple g;
    g.y = {-I * j1, I * j2, I * j3};
    return g;
}

GeneratorTriple direct_sum(const std::vector<GeneratorTriple>& parts) {
    if (parts.empty()) throw Error("direct_sum: empty part list");
    Eigen::Index total = 0;
    for (const auto& p : parts) total += p.dim();
    GeneratorTriple g;
    for (int i = 0; i < 3; ++i) {
        g.y[static_cast<size_t>(i)] = Mat::Zero(total, total);
        Eigen::Index off = 0;
        for (const auto& p : parts) {
            g.y[static_cast<size_t>(i)].block(off, off, p.dim(), p.dim()) = p[i];
            off += p.dim();
        }
    }
    return g;
}

double check_homomorphism(const GeneratorTriple& t) {
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            Mat lhs = commutator(t[i], t[j]);
            for (int k = 0; k < 3; ++k)
                if (int e = levi_civita(i, j, k); e != 0) lhs -= static_cast<double>(e) * t[k];
            worst = std::max(worst, lhs.norm());
        }
    return worst;
}

Mat casimir(const GeneratorTriple& t) {
    return -(t[0] * t[0] + t[1] * t[1] + t[2] * t[2]);
}

RepDecomposition decompose_rep(const GeneratorTriple& t, double comm_tol, double cluster_tol) {
    GeneratorTriple neg{{-t[0], -t[1], -t[2]}};
    double defect = std::min(check_homomorphism(t), check_homomorphism(neg));
    if (defect > comm_tol)
        throw NotARepresentationError("decompose_rep: commutator residual " +
                                      std::to_string(defect));
    Mat cas = casimir(t);
    cas = 0.5 * (cas + cas.adjoint());  // strip extraction noise
    auto eig = hermitian_eigen(cas);

    RepDecomposition counts;
    for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
        double c = eig.eigenvalues(i);
        int m = static_cast<int>(std::lround(std::sqrt(std::max(0.0, 4.0 * c + 1.0))));
        m = std::max(1, m);
        double target = 0.25 * (static_cast<double>(m) * m - 1.0);
        if (std::abs(c - target) > cluster_tol)
            throw InconsistentCasimirError("decompose_rep: eigenvalue " + std::to_string(c) +
                                           " not near any (m^2-1)/4");
        counts[m] += 1;
    }
    RepDecomposition result;
    for (auto [m, cnt] : counts) {
        if (cnt % m != 0)
            throw InconsistentCasimirError("decompose_rep: cluster for m = " + std::to_string(m) +
                                           " has multiplicity " + std::to_string(cnt));
        result[m] = cnt / m;
    }
    return result;
}

int rep_dimension(const RepDecomposition& d) {
    int total = 0;
    for (auto [m, mult] : d) total += m * mult;
    return total;
}

std::string format_decomposition(const RepDecomposition& d) {
    std::ostringstream os;
    bool first = true;
    for (auto it = d.rbegin(); it != d.rend(); ++it) {
        if (!first) os << " + ";
        first = false;
        os << "V" << it->first;
        if (it->second > 1) os << "^" << it->second;
    }
    return os.str();
}

}  // namespace nahmforge
