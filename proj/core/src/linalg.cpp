#include "nahmforge/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace nahmforge {

HermitianEigen hermitian_eigen(const Mat& m, double tol_herm) {
    if (m.rows() != m.cols()) throw NotHermitianError("hermitian_eigen: matrix not square");
    double scale = std::max(1.0, m.norm());
    double defect = (m - m.adjoint()).norm() / scale;
    if (defect > tol_herm)
        throw NotHermitianError("hermitian_eigen: Hermiticity defect " + std::to_string(defect));
    Eigen::SelfAdjointEigenSolver<Mat> solver(m);
    if (solver.info() != Eigen::Success)
        throw Error("hermitian_eigen: eigensolver failed to converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

Mat nullspace(const Mat& m, double tol) {
    if (tol <= 0.0) throw Error("nullspace: tol must be positive");
    Eigen::BDCSVD<Mat> svd(m, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double smax = sv.size() > 0 ? sv(0) : 0.0;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > tol * smax) ++rank;
    return svd.matrixV().rightCols(m.cols() - rank);
}

Eigen::Index rank_deficiency(const Mat& m, double tol) {
    Eigen::BDCSVD<Mat> svd(m);
    const auto& sv = svd.singularValues();
    double smax = sv.size() > 0 ? sv(0) : 0.0;
    Eigen::Index deficient = m.cols() - sv.size();  // columns beyond min(rows, cols)
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) <= tol * smax) ++deficient;
    return deficient;
}

}  // namespace nahmforge
