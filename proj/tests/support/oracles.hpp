#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace oracle {

/// Coefficients from (X'X)^-1 X'y with an explicit inverse.
Eigen::MatrixXd normal_equations(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

double rss(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

/// Granger F from two separately built regressions. endo is T x 2, the
/// stimulus column's lags are dropped in the restricted model.
double granger_f(const Eigen::MatrixXd& endo, const Eigen::MatrixXd& exog, std::size_t p, int stimulus,
                 int response);

/// Direct evaluation of PMI = ln(P(w|c)/P(w)) and NPMI = PMI / -ln P(w,c).
double npmi(double count_target, double total_target, double count_rest, double total_rest, double vocabulary);

/// Kolmogorov-Smirnov test against U(0,1); asymptotic p-value with
/// Stephens' small-sample correction.
double ks_uniform_p(std::vector<double> sample);

/// Ljung-Box Q from sample autocorrelations.
double ljung_box_q(std::span<const double> x, std::size_t lags);

/// y_t = sum_i A_i y_{t-i} + e_t with N(0, 1) shocks and a burn-in.
Eigen::MatrixXd simulate_var(const std::vector<Eigen::Matrix2d>& a, std::size_t n, std::mt19937_64& rng,
                             std::size_t burn = 200);

std::vector<double> white_noise(std::size_t n, std::mt19937_64& rng);
std::vector<double> random_walk(std::size_t n, std::mt19937_64& rng);
std::vector<double> ar1(std::size_t n, double phi, std::mt19937_64& rng);

}  // namespace oracle
