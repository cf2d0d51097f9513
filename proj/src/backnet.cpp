#include "relnet/backnet.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "relnet/kernels.hpp"

namespace relnet::backnet {

using nlohmann::json;

DenseHead make_dense_head(int input_dim, Rng& rng) {
  if (input_dim <= 0) throw std::invalid_argument("make_dense_head: bad input dim");
  DenseHead head;
  head.input_dim = input_dim;
  head.w = Param("head_w", static_cast<std::size_t>(2) * input_dim);
  for (double& x : head.w.value) x = rng.uniform(-0.05, 0.05);
  head.b = Param("head_b", 2);
  return head;
}

std::array<double, 2> head_logits(const std::vector<double>& v, const DenseHead& head) {
  if (static_cast<int>(v.size()) != head.input_dim)
    throw std::invalid_argument("dense head: input dim mismatch");
  return {kernels::dot(head.w_row(0), v.data(), v.size()) + head.b.value[0],
          kernels::dot(head.w_row(1), v.data(), v.size()) + head.b.value[1]};
}

std::array<double, 2> softmax2(const std::array<double, 2>& logits) {
  const double m = std::max(logits[0], logits[1]);
  const double e0 = std::exp(logits[0] - m);
  const double e1 = std::exp(logits[1] - m);
  const double z = e0 + e1;
  return {e0 / z, e1 / z};
}

std::array<double, 2> dense_softmax(const std::vector<double>& v, const DenseHead& head) {
  return softmax2(head_logits(v, head));
}

CrossEntropyResult cross_entropy(const std::array<double, 2>& probs, corpus::Label label) {
  const int idx = static_cast<int>(label);
  CrossEntropyResult r;
  r.loss = -std::log(std::max(probs[idx], 1e-12));
  r.d_logits = probs;
  r.d_logits[idx] -= 1.0;
  return r;
}

std::vector<double> head_backward(DenseHead& head, const std::vector<double>& v,
                                  const std::array<double, 2>& d_logits) {
  std::vector<double> dv(v.size(), 0.0);
  for (int cls = 0; cls < 2; ++cls) {
    const double g = d_logits[cls];
    if (g == 0.0) continue;
    kernels::axpy(g, v.data(), head.w.grad.data() + static_cast<std::size_t>(cls) * head.input_dim,
                  v.size());
    head.b.grad[cls] += g;
    kernels::axpy(g, head.w_row(cls), dv.data(), v.size());
  }
  return dv;
}

double rbf_kernel(const double* a, const double* b, std::size_t n, double gamma) {
  if (gamma <= 0.0) throw std::invalid_argument("rbf_kernel: gamma must be positive");
  return std::exp(-gamma * kernels::squared_distance(a, b, n));
}

double rbf_kernel(const std::vector<double>& a, const std::vector<double>& b, double gamma) {
  if (a.size() != b.size()) throw std::invalid_argument("rbf_kernel: dimension mismatch");
  return rbf_kernel(a.data(), b.data(), a.size(), gamma);
}

void save_features(const FeatureDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write features file: " + path);
  for (std::size_t i = 0; i < data.size(); ++i) {
    json j;
    j["x"] = std::vector<double>(data.x.row(i), data.x.row(i) + data.x.cols());
    j["y"] = data.y[i];
    out << j.dump() << "\n";
  }
}

FeatureDataset load_features(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open features file: " + path);
  std::vector<std::vector<double>> rows;
  std::vector<int> ys;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      json j = json::parse(line);
      rows.push_back(j.at("x").get<std::vector<double>>());
      const int y = j.at("y").get<int>();
      if (y != 1 && y != -1) throw DataError("label must be +1 or -1");
      ys.push_back(y);
    } catch (const json::exception& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (rows.back().size() != rows.front().size())
      throw DataError(path + ":" + std::to_string(line_no) + ": inconsistent feature dimension");
  }
  FeatureDataset data;
  data.y = std::move(ys);
  data.x = Matrix(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    std::copy(rows[i].begin(), rows[i].end(), data.x.row(i));
  return data;
}

void save_svm(const SvmModel& model, const std::string& path) {
  json j;
  j["gamma"] = model.gamma;
  j["c"] = model.c;
  j["bias"] = model.bias;
  j["dual_coefs"] = model.dual_coefs;
  j["support_vectors"] = json::array();
  for (std::size_t i = 0; i < model.support_vectors.rows(); ++i)
    j["support_vectors"].push_back(std::vector<double>(
        model.support_vectors.row(i), model.support_vectors.row(i) + model.support_vectors.cols()));
  std::ofstream out(path);
  if (!out) throw DataError("cannot write SVM model file: " + path);
  out << j.dump(2) << "\n";
}

SvmModel load_svm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open SVM model file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("malformed SVM model file " + path + ": " + e.what());
  }
  SvmModel model;
  try {
    model.gamma = j.at("gamma").get<double>();
    model.c = j.at("c").get<double>();
    model.bias = j.at("bias").get<double>();
    model.dual_coefs = j.at("dual_coefs").get<std::vector<double>>();
    auto sv = j.at("support_vectors").get<std::vector<std::vector<double>>>();
    if (sv.size() != model.dual_coefs.size())
      throw DataError("support vector / dual coefficient count mismatch");
    model.support_vectors = Matrix(sv.size(), sv.empty() ? 0 : sv.front().size());
    for (std::size_t i = 0; i < sv.size(); ++i) {
      if (sv[i].size() != model.support_vectors.cols())
        throw DataError("ragged support vector matrix");
      std::copy(sv[i].begin(), sv[i].end(), model.support_vectors.row(i));
    }
  } catch (const json::exception& e) {
    throw DataError("malformed SVM model file " + path + ": " + e.what());
  }
  return model;
}

namespace {

// Kernel evaluations with an optional full Gram cache.
class KernelSource {
 public:
  KernelSource(const FeatureDataset& data, double gamma, std::size_t gram_limit)
      : data_(data), gamma_(gamma) {
    const std::size_t n = data.size();
    if (n <= gram_limit) {
      gram_ = Matrix(n, n);
      for (std::size_t i = 0; i < n; ++i) {
        gram_.at(i, i) = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
          const double k = rbf_kernel(data.x.row(i), data.x.row(j), data.x.cols(), gamma_);
          gram_.at(i, j) = k;
          gram_.at(j, i) = k;
        }
      }
      cached_ = true;
    }
  }

  double operator()(std::size_t i, std::size_t j) const {
    if (cached_) return gram_.at(i, j);
    if (i == j) return 1.0;
    return rbf_kernel(data_.x.row(i), data_.x.row(j), data_.x.cols(), gamma_);
  }

 private:
  const FeatureDataset& data_;
  double gamma_;
  Matrix gram_;
  bool cached_ = false;
};

}  // namespace

double dual_objective(const FeatureDataset& data, const std::vector<double>& alphas, double gamma) {
  const std::size_t n = data.size();
  double linear = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    linear += alphas[i];
    if (alphas[i] == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (alphas[j] == 0.0) continue;
      const double k = i == j ? 1.0 : rbf_kernel(data.x.row(i), data.x.row(j), data.x.cols(), gamma);
      quad += alphas[i] * alphas[j] * data.y[i] * data.y[j] * k;
    }
  }
  return linear - 0.5 * quad;
}

SmoResult smo_train(const FeatureDataset& data, double c, double gamma, const SmoOptions& opts) {
  const std::size_t n = data.size();
  if (n < 2) throw DataError("smo_train: need at least two points");
  if (c <= 0.0) throw std::invalid_argument("smo_train: C must be positive");
  if (gamma <= 0.0) throw std::invalid_argument("smo_train: gamma must be positive");
  bool has_pos = false, has_neg = false;
  for (int y : data.y) {
    if (y == 1) has_pos = true;
    else if (y == -1) has_neg = true;
    else throw DataError("smo_train: labels must be +1 or -1");
  }
  if (!has_pos || !has_neg) throw DataError("smo_train: training data contains a single class");

  const KernelSource kernel(data, gamma, opts.gram_limit);
  std::vector<double> alpha(n, 0.0);
  std::vector<double> g(n, 0.0);  // sum_j alpha_j y_j K_ij, i.e. f(x_i) without bias
  double b = 0.0;
  Rng rng(derive_seed(opts.seed, "smo"));
  SmoResult result;

  const auto take_step = [&](std::size_t i, std::size_t j) -> bool {
    if (i == j) return false;
    const double yi = data.y[i], yj = data.y[j];
    const double ei = g[i] + b - yi;
    const double ej = g[j] + b - yj;
    const double ai_old = alpha[i], aj_old = alpha[j];
    double lo, hi;
    if (yi != yj) {
      lo = std::max(0.0, aj_old - ai_old);
      hi = std::min(c, c + aj_old - ai_old);
    } else {
      lo = std::max(0.0, ai_old + aj_old - c);
      hi = std::min(c, ai_old + aj_old);
    }
    if (lo >= hi) return false;
    const double kii = kernel(i, i), kjj = kernel(j, j), kij = kernel(i, j);
    const double eta = 2.0 * kij - kii - kjj;
    double aj_new;
    if (eta < 0.0) {
      aj_new = std::clamp(aj_old - yj * (ei - ej) / eta, lo, hi);
    } else {
      // flat or degenerate direction: evaluate the pair objective at both
      // ends of the feasible segment
      const double s = yi * yj;
      const double vi = g[i] - ai_old * yi * kii - aj_old * yj * kij;
      const double vj = g[j] - ai_old * yi * kij - aj_old * yj * kjj;
      const auto pair_objective = [&](double ai, double aj) {
        return ai + aj - 0.5 * (ai * ai * kii + aj * aj * kjj) - s * ai * aj * kij -
               ai * yi * vi - aj * yj * vj;
      };
      const double obj_lo = pair_objective(ai_old + s * (aj_old - lo), lo);
      const double obj_hi = pair_objective(ai_old + s * (aj_old - hi), hi);
      if (obj_lo > obj_hi + 1e-12)
        aj_new = lo;
      else if (obj_hi > obj_lo + 1e-12)
        aj_new = hi;
      else
        return false;
    }
    // snap to the box to keep support vectors sparse
    if (aj_new < 1e-10) aj_new = 0.0;
    if (aj_new > c - 1e-10) aj_new = c;
    if (std::abs(aj_new - aj_old) < 1e-12) return false;
    double ai_new = ai_old + yi * yj * (aj_old - aj_new);
    if (ai_new < 1e-10) ai_new = 0.0;
    if (ai_new > c - 1e-10) ai_new = c;
    alpha[i] = ai_new;
    alpha[j] = aj_new;

    const double di = yi * (ai_new - ai_old);
    const double dj = yj * (aj_new - aj_old);
    const double b1 = b - ei - di * kii - dj * kij;
    const double b2 = b - ej - di * kij - dj * kjj;
    if (ai_new > 0.0 && ai_new < c)
      b = b1;
    else if (aj_new > 0.0 && aj_new < c)
      b = b2;
    else
      b = 0.5 * (b1 + b2);
    for (std::size_t k = 0; k < n; ++k) g[k] += di * kernel(i, k) + dj * kernel(j, k);
    if (opts.record_objective) result.objective_trace.push_back(dual_objective(data, alpha, gamma));
    return true;
  };

  int clean_passes = 0;
  int sweeps = 0;
  while (clean_passes < opts.max_passes && sweeps < opts.max_sweeps) {
    ++sweeps;
    int changed = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = (g[i] + b - data.y[i]) * data.y[i];
      const bool violates = (r < -opts.tol && alpha[i] < c) || (r > opts.tol && alpha[i] > 0.0);
      if (!violates) continue;
      // random second index, then a deterministic scan from a random start
      std::size_t j = rng.next_below(n - 1);
      if (j >= i) ++j;
      if (take_step(i, j)) {
        ++changed;
        continue;
      }
      const std::size_t start = rng.next_below(n);
      for (std::size_t off = 0; off < n; ++off) {
        j = (start + off) % n;
        if (j == i) continue;
        if (take_step(i, j)) {
          ++changed;
          break;
        }
      }
    }
    if (changed == 0)
      ++clean_passes;
    else
      clean_passes = 0;
  }
  result.converged = clean_passes >= opts.max_passes;
  result.sweeps = sweeps;

  // Final bias from unbounded support vectors (averaged); with none, the
  // midpoint of the KKT-feasible interval.
  double sum_free = 0.0;
  int n_free = 0;
  double b_hi = HUGE_VAL, b_lo = -HUGE_VAL;
  for (std::size_t i = 0; i < n; ++i) {
    const double target = data.y[i] - g[i];
    if (alpha[i] > 0.0 && alpha[i] < c) {
      sum_free += target;
      ++n_free;
    } else if ((data.y[i] == 1 && alpha[i] >= c) || (data.y[i] == -1 && alpha[i] <= 0.0)) {
      b_hi = std::min(b_hi, target);
    } else {
      b_lo = std::max(b_lo, target);
    }
  }
  if (n_free > 0)
    b = sum_free / n_free;
  else if (std::isfinite(b_hi) && std::isfinite(b_lo))
    b = 0.5 * (b_lo + b_hi);
  else if (std::isfinite(b_hi))
    b = b_hi;
  else if (std::isfinite(b_lo))
    b = b_lo;

  SvmModel& model = result.model;
  model.gamma = gamma;
  model.c = c;
  model.bias = b;
  std::size_t n_sv = 0;
  for (double a : alpha)
    if (a > 0.0) ++n_sv;
  model.support_vectors = Matrix(n_sv, data.x.cols());
  model.dual_coefs.reserve(n_sv);
  std::size_t row = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (alpha[i] <= 0.0) continue;
    std::copy(data.x.row(i), data.x.row(i) + data.x.cols(), model.support_vectors.row(row));
    model.dual_coefs.push_back(alpha[i] * data.y[i]);
    ++row;
  }
  result.alphas = std::move(alpha);
  return result;
}

Decision svm_decision(const SvmModel& model, const double* x, std::size_t n) {
  if (n != model.support_vectors.cols())
    throw std::invalid_argument("svm_decision: dimension mismatch");
  double score = model.bias;
  for (std::size_t i = 0; i < model.support_vectors.rows(); ++i)
    score += model.dual_coefs[i] * rbf_kernel(model.support_vectors.row(i), x, n, model.gamma);
  Decision d;
  d.score = score;
  d.label = score > 0.0 ? corpus::Label::True : corpus::Label::False;
  return d;
}

Decision svm_decision(const SvmModel& model, const std::vector<double>& x) {
  return svm_decision(model, x.data(), x.size());
}

}  // namespace relnet::backnet
