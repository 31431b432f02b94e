#pragma once

// Slow, direct re-derivations used to check the library. Nothing here calls
// into the code under test except for plain data types.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "stratify/core/matrix.hpp"

namespace oracle {

using stratify::Labels;
using stratify::Matrix;

double euclid(std::span<const double> a, std::span<const double> b);

// P(score_pos > score_neg) + 0.5 P(tie) over all positive/negative pairs.
double mann_whitney_auc(const std::vector<int>& y, const std::vector<double>& s);

// Lowest K = 2 partition cost over every split of the rows into two non-empty groups.
double best_two_partition_cost(const Matrix& X);
double partition_cost(const Matrix& X, const Labels& labels, std::size_t k);

// Validity indices straight from their definitions (double loops over points).
double silhouette(const Matrix& X, const Labels& l, std::size_t k);
double calinski_harabasz(const Matrix& X, const Labels& l, std::size_t k);
double davies_bouldin(const Matrix& X, const Labels& l, std::size_t k);
double dunn(const Matrix& X, const Labels& l, std::size_t k);
double c_index(const Matrix& X, const Labels& l, std::size_t k);
double mcclain(const Matrix& X, const Labels& l, std::size_t k);
double point_biserial(const Matrix& X, const Labels& l, std::size_t k);
double ball(const Matrix& X, const Labels& l, std::size_t k);
double hartigan(const Matrix& X, const Labels& l, std::size_t k, double w_next);
double krzanowski_lai(const Matrix& X, const Labels& l, std::size_t k, double w_prev, double w_next);

// Central finite differences of f at x.
std::vector<double> numeric_gradient(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x,
                                     double h = 1e-6);
double relative_error(const std::vector<double>& a, const std::vector<double>& b);

// Shapley values by averaging marginal contributions over all p! orderings,
// v(S) = mean over background rows of f(x on S, background elsewhere).
std::vector<double> shapley_permutations(const std::function<double(std::span<const double>)>& f,
                                         std::span<const double> x, const Matrix& background);

// Minimiser of sum_i (g_i w + h_i w^2 / 2) + lambda w^2 / 2, by bisection on its derivative.
double quadratic_leaf_minimiser(const std::vector<double>& g, const std::vector<double>& h, double lambda);

// n (ad - bc)^2 / (r1 r2 c1 c2)
double chi2_2x2(double a, double b, double c, double d);

}  // namespace oracle
