#pragma once

#include "nahmforge/common.hpp"
#include "nahmforge/nahm.hpp"

#include <utility>
#include <vector>

namespace nahmforge {

/// Max residual of the linearized axial-symmetry conditions around the third axis:
/// T1 - [T2,Y], T2 - [Y,T1], [Y,T3].
double check_axial(const NahmTriple& t, const Mat& y);

/// Spectrum of ad_Y^2 on matrix space via eigenvalue gaps of Y (anti-Hermitian,
/// eigenvalues i*alpha_k; ad_Y^2 has eigenvalues -(alpha_i - alpha_j)^2).
/// Returns (true iff -1 is present within tol, sorted spectrum).
std::pair<bool, std::vector<double>> ad_squared_has_minus_one(const Mat& y, double tol = 1e-10);

/// Y_{alpha,beta} = i diag(alpha, beta, -(alpha+beta)) in su(3).
Mat su3_y_alpha_beta(double alpha, double beta);

/// Real dimension of ker(ad^2_{Y_{alpha,beta}} + id), from the three squared gaps
/// (alpha-beta)^2, (2 alpha+beta)^2, (alpha+2 beta)^2. Requires the dominance
/// ordering alpha >= beta >= -(alpha+beta).
int su3_minus_one_dim(double alpha, double beta);

/// Reduced axially symmetric flow: dT1 = [Y,[T1,T3]], dT3 = [T1,[Y,T1]].
/// Requires [Y,T3] = 0 within 1e-10 (GeneratorMismatchError otherwise).
std::pair<Mat, Mat> axial_reduced_rhs(const Mat& t1, const Mat& t3, const Mat& y);

/// Canonical real-z chart of the su(3) ansatz with generator Y_{1/2,0}.
struct Su3AxialState {
    double a = 0, b = 0, z = 0;
    double alpha = 0.5, beta = 0.0;
};

/// Triple assembled from the chart: T1 = z(E13 - E31), T2 = iz(E13 + E31),
/// T3 = i diag(a, -(a+b), b). Complex z inputs are meant to be rotated into this
/// chart by the caller; the chart itself is real.
NahmTriple su3_axial_triple(const Su3AxialState& s);

struct Su3ExampleValue {
    Su3AxialState state;
    NahmTriple triple;
    double a_profile;  // A(t) = a - b
};

/// Closed-form family of the Y_{1/2,0} ansatz:
///   A' = A^2 + K with A = -sqrt(K) cot(sqrt(K)(t-c)) / -(t-c)^-1 / -sqrt(-K) coth(...)
/// and z = sqrt(A^2 + K)/2, a = (A + k1)/2, b = k1 - a.
/// Throws SingularPointError on the singular set.
Su3ExampleValue su3_example_solution(double K, double c, double t, double k1 = 0.0);

/// The same family as a NahmSolution. Domain: (c, c + pi/sqrt(K)) when K > 0
/// (simple poles at both ends), (c, c + span) otherwise (pole at c only).
NahmSolution axial_su3_solution(double K, double c, double k1 = 0.0, double span = 4.0);

/// A(t) of the su3 example, plus its singular set helpers.
double axial_a_profile(double K, double c, double t);
/// Distance from t to the nearest singular point of the branch.
double axial_singular_distance(double K, double c, double t);
/// Constant of integration c from a sample A(t0) = a0 - b0.
double axial_constant_from_seed(double K, double t0, double a_value);

}  // namespace nahmforge
