#pragma once

// Test-only oracles. These deliberately re-derive expected values through
// independent code paths (plain double loops, quadrature) so the library can
// be checked against them rather than against itself.

#include <cmath>
#include <cstddef>
#include <vector>

#include "wshift/core.hpp"
#include "wshift/rng.hpp"

namespace oracle {

// 1-NN imputation, written the obvious way: for each target point scan all
// source points, keep the strictly closest (first wins on ties), average the
// matched g-values over targets in order.
inline double nn_imputation_mean(const wshift::SourceDataset& src,
                                 const wshift::TargetDataset& tgt,
                                 const wshift::Functional& g) {
  double total = 0.0;
  for (std::size_t j = 0; j < tgt.points.size(); ++j) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < src.samples.size(); ++i) {
      double dist = 0.0;
      for (std::size_t l = 0; l < src.d; ++l) {
        const double diff = src.samples[i].x[l] - tgt.points[j][l];
        dist += diff * diff;
      }
      if (dist < best) {
        best = dist;
        best_i = i;
      }
    }
    total += g(src.samples[best_i].x, src.samples[best_i].y);
  }
  return total / static_cast<double>(tgt.points.size());
}

// Missing-data mean: walk the rows in order; observed rows contribute their
// own g, missing rows the g of the nearest complete case.
inline double md_imputation_mean(const wshift::MissingDataset& md, const wshift::Functional& g) {
  std::vector<std::size_t> complete;
  for (std::size_t i = 0; i < md.rows.size(); ++i)
    if (md.rows[i].observed()) complete.push_back(i);
  double total = 0.0;
  for (const auto& row : md.rows) {
    if (row.observed()) {
      total += g(row.x, *row.y);
      continue;
    }
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_i = complete.front();
    for (std::size_t i : complete) {
      double dist = 0.0;
      for (std::size_t l = 0; l < md.d; ++l) {
        const double diff = md.rows[i].x[l] - row.x[l];
        dist += diff * diff;
      }
      if (dist < best) {
        best = dist;
        best_i = i;
      }
    }
    total += g(md.rows[best_i].x, *md.rows[best_i].y);
  }
  return total / static_cast<double>(md.rows.size());
}

// Gauss-Hermite nodes and weights for integrals of f(t) exp(-t^2), via Newton
// iteration on the orthonormal Hermite recurrence; nodes descend from the
// largest root.
inline void gauss_hermite(std::size_t n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const double eps = 1e-14;
  const std::size_t half = (n + 1) / 2;
  double z = 0.0;
  for (std::size_t i = 0; i < half; ++i) {
    if (i == 0)
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    else if (i == 1)
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * x[0];
    else if (i == 3)
      z = 1.91 * z - 0.91 * x[1];
    else
      z = 2.0 * z - x[i - 2];
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 0.7511255444649425;  // pi^(-1/4)
      double p2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 -
             std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= eps) break;
    }
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = 2.0 / (pp * pp);
    w[n - 1 - i] = w[i];
  }
}

// E[h(X1, X2)] for independent Xi ~ N(mean, sd^2) by tensorized quadrature.
template <class H>
double gauss_hermite_expectation_2d(H&& h, double mean, double sd, std::size_t points = 40) {
  std::vector<double> x, w;
  gauss_hermite(points, x, w);
  const double root2 = std::sqrt(2.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < points; ++i)
    for (std::size_t j = 0; j < points; ++j)
      acc += w[i] * w[j] * h(mean + root2 * sd * x[i], mean + root2 * sd * x[j]);
  const double pi = 3.14159265358979323846;
  return acc / pi;
}

// Uniform toy instance generators used across test files.
inline wshift::SourceDataset random_source(std::size_t n, std::size_t d, wshift::Rng& rng) {
  wshift::SourceDataset src;
  src.d = d;
  for (std::size_t i = 0; i < n; ++i) {
    wshift::LabeledSample s;
    for (std::size_t l = 0; l < d; ++l) s.x.push_back(rng.uniform());
    s.y = 2.0 * rng.uniform() - 1.0;
    src.samples.push_back(std::move(s));
  }
  return src;
}

inline wshift::TargetDataset random_target(std::size_t m, std::size_t d, wshift::Rng& rng) {
  wshift::TargetDataset tgt;
  tgt.d = d;
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> x;
    for (std::size_t l = 0; l < d; ++l) x.push_back(rng.uniform());
    tgt.points.push_back(std::move(x));
  }
  return tgt;
}

}  // namespace oracle
