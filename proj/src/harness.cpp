#include "relnet/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace relnet::harness {

using nlohmann::json;

NNGridSpec NNGridSpec::default_cnn() { return NNGridSpec{}; }

NNGridSpec NNGridSpec::default_lstm(frontnet::Topology topology) {
  NNGridSpec spec;
  spec.topology = topology;
  spec.dropouts = {0.0, 0.25, 0.50};
  return spec;
}

std::string NNConfigPoint::descriptor() const {
  std::ostringstream os;
  os << frontnet::topology_name(topology) << "; ";
  if (topology == frontnet::Topology::Cnn) {
    os << "Filter=" << filters << "; Window=";
    for (std::size_t i = 0; i < windows.size(); ++i) {
      if (i) os << ",";
      os << windows[i];
    }
    os << "; ";
  } else {
    os << "Hidden=" << hidden << "; ";
  }
  os << "Dropout=" << dropout << "; POS-Tag Dim=" << postag_dim;
  return os.str();
}

std::vector<NNConfigPoint> enumerate_nn_grid(const NNGridSpec& spec) {
  std::vector<NNConfigPoint> out;
  if (spec.dropouts.empty() || spec.postag_dims.empty())
    throw std::invalid_argument("enumerate_nn_grid: empty value list");
  if (spec.topology == frontnet::Topology::Cnn) {
    if (spec.filters.empty() || spec.windows.empty())
      throw std::invalid_argument("enumerate_nn_grid: empty value list");
    for (int f : spec.filters)
      for (const std::vector<int>& w : spec.windows)
        for (double d : spec.dropouts)
          for (int pd : spec.postag_dims) {
            NNConfigPoint p;
            p.topology = spec.topology;
            p.filters = f;
            p.windows = w;
            p.dropout = d;
            p.postag_dim = pd;
            out.push_back(std::move(p));
          }
  } else {
    if (spec.hidden.empty()) throw std::invalid_argument("enumerate_nn_grid: empty value list");
    for (double d : spec.dropouts)
      for (int h : spec.hidden)
        for (int pd : spec.postag_dims) {
          NNConfigPoint p;
          p.topology = spec.topology;
          p.hidden = h;
          p.dropout = d;
          p.postag_dim = pd;
          out.push_back(std::move(p));
        }
  }
  return out;
}

std::string SvmConfigPoint::descriptor() const {
  std::ostringstream os;
  os << "SVM; C=10^" << c_exp << "; Gamma=10^" << gamma_exp;
  return os.str();
}

std::vector<SvmConfigPoint> enumerate_svm_grid(const SvmGridSpec& spec) {
  if (spec.c_exp_lo > spec.c_exp_hi || spec.gamma_exp_lo > spec.gamma_exp_hi)
    throw std::invalid_argument("enumerate_svm_grid: empty exponent range");
  std::vector<SvmConfigPoint> out;
  for (int g = spec.gamma_exp_lo; g <= spec.gamma_exp_hi; ++g)
    for (int c = spec.c_exp_lo; c <= spec.c_exp_hi; ++c) out.push_back({c, g});
  return out;
}

namespace {

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  const int threads = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

double seconds_since(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::vector<ExperimentResult> run_nn_grid(const std::vector<NNConfigPoint>& configs,
                                          const std::vector<corpus::EncodedInstance>& train_data,
                                          const std::vector<corpus::EncodedInstance>& eval_data,
                                          const NNGridContext& ctx) {
  std::vector<ExperimentResult> results(configs.size());
  parallel_for(configs.size(), ctx.workers, [&](std::size_t i) {
    const NNConfigPoint& point = configs[i];
    ExperimentResult& r = results[i];
    r.descriptor = point.descriptor();
    r.seed = derive_seed(ctx.seed, "nn-grid", i);
    const auto start = std::chrono::steady_clock::now();
    try {
      optim::NetworkConfig cfg = ctx.base;
      cfg.topology = point.topology;
      cfg.dropout_rate = point.dropout;
      cfg.feature.postag_dim = point.postag_dim;
      if (point.topology == frontnet::Topology::Cnn) {
        cfg.cnn_filters = point.filters;
        cfg.cnn_windows = point.windows;
      } else {
        cfg.lstm_hidden = point.hidden;
      }
      optim::NetworkModel model = optim::build_network(cfg, r.seed);
      if (ctx.pretrained_words) optim::set_word_table(model, *ctx.pretrained_words);

      optim::TrainConfig tc = ctx.train;
      tc.seed = r.seed;
      optim::train(model, train_data, tc);

      std::vector<corpus::Label> preds, golds;
      preds.reserve(eval_data.size());
      golds.reserve(eval_data.size());
      for (const corpus::EncodedInstance& inst : eval_data) {
        preds.push_back(optim::model_predict(model, inst));
        golds.push_back(inst.label);
      }
      r.report = evaluation::evaluate(preds, golds);
      r.ok = true;
    } catch (const std::exception& e) {
      r.ok = false;
      r.error = e.what();
    }
    r.seconds = seconds_since(start);
  });
  return results;
}

std::vector<ExperimentResult> run_svm_grid(const backnet::FeatureDataset& train_features,
                                           const backnet::FeatureDataset& eval_features,
                                           const SvmGridSpec& grid, const SvmGridContext& ctx) {
  const std::vector<SvmConfigPoint> points = enumerate_svm_grid(grid);
  std::vector<ExperimentResult> results(points.size());
  parallel_for(points.size(), ctx.workers, [&](std::size_t i) {
    const SvmConfigPoint& point = points[i];
    ExperimentResult& r = results[i];
    r.descriptor = point.descriptor();
    r.c_exp = point.c_exp;
    r.gamma_exp = point.gamma_exp;
    r.seed = derive_seed(ctx.seed, "svm-grid", i);
    const auto start = std::chrono::steady_clock::now();
    try {
      backnet::SmoOptions opts = ctx.smo;
      opts.seed = r.seed;
      const double c = std::pow(10.0, point.c_exp);
      const double gamma = std::pow(10.0, point.gamma_exp);
      backnet::SmoResult smo = backnet::smo_train(train_features, c, gamma, opts);

      std::vector<corpus::Label> preds, golds;
      preds.reserve(eval_features.size());
      for (std::size_t k = 0; k < eval_features.size(); ++k) {
        preds.push_back(
            backnet::svm_decision(smo.model, eval_features.x.row(k), eval_features.x.cols()).label);
        golds.push_back(eval_features.y[k] == 1 ? corpus::Label::True : corpus::Label::False);
      }
      r.report = evaluation::evaluate(preds, golds);
      r.ok = true;
    } catch (const std::exception& e) {
      r.ok = false;
      r.error = e.what();
    }
    r.seconds = seconds_since(start);
  });
  return results;
}

void export_heatmap(const std::vector<ExperimentResult>& results, const std::string& path) {
  std::set<int> c_set, g_set;
  std::map<std::pair<int, int>, double> cells;  // (gamma, c) -> weighted F1
  for (const ExperimentResult& r : results) {
    if (!r.c_exp || !r.gamma_exp) continue;
    if (!r.ok)
      throw DataError("heatmap cell (C=10^" + std::to_string(*r.c_exp) + ", gamma=10^" +
                      std::to_string(*r.gamma_exp) + ") failed: " + r.error);
    c_set.insert(*r.c_exp);
    g_set.insert(*r.gamma_exp);
    cells[{*r.gamma_exp, *r.c_exp}] = r.report.weighted_f1;
  }
  if (cells.empty()) throw DataError("export_heatmap: no SVM grid results");
  for (int g : g_set)
    for (int c : c_set)
      if (cells.find({g, c}) == cells.end())
        throw DataError("export_heatmap: missing cell (C=10^" + std::to_string(c) + ", gamma=10^" +
                        std::to_string(g) + ")");

  std::ofstream out(path);
  if (!out) throw DataError("cannot write heatmap file: " + path);
  out << "gamma\\c";
  for (int c : c_set) out << "," << c;
  out << "\n";
  char buf[64];
  for (int g : g_set) {
    out << g;
    for (int c : c_set) {
      std::snprintf(buf, sizeof buf, "%.17g", cells[{g, c}]);
      out << "," << buf;
    }
    out << "\n";
  }
}

Heatmap load_heatmap(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open heatmap file: " + path);
  Heatmap hm;
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty heatmap file");
  {
    std::istringstream iss(line);
    std::string field;
    if (!std::getline(iss, field, ',') || field != "gamma\\c")
      throw DataError(path + ": bad heatmap header");
    while (std::getline(iss, field, ',')) hm.c_exps.push_back(std::stoi(field));
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream iss(line);
    std::string field;
    std::getline(iss, field, ',');
    hm.gamma_exps.push_back(std::stoi(field));
    std::vector<double> row;
    while (std::getline(iss, field, ',')) row.push_back(std::stod(field));
    if (row.size() != hm.c_exps.size()) throw DataError(path + ": ragged heatmap row");
    rows.push_back(std::move(row));
  }
  hm.values = Matrix(rows.size(), hm.c_exps.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    std::copy(rows[r].begin(), rows[r].end(), hm.values.row(r));
  return hm;
}

const ExperimentResult& select_best(const std::vector<ExperimentResult>& results) {
  const ExperimentResult* best = nullptr;
  for (const ExperimentResult& r : results) {
    if (!r.ok) continue;
    if (!best || r.report.weighted_f1 > best->report.weighted_f1 ||
        (r.report.weighted_f1 == best->report.weighted_f1 && r.descriptor < best->descriptor))
      best = &r;
  }
  if (!best) throw DataError("select_best: every experiment failed");
  return *best;
}

void save_results(const std::vector<ExperimentResult>& results, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write results file: " + path);
  for (const ExperimentResult& r : results) {
    json j;
    j["descriptor"] = r.descriptor;
    j["ok"] = r.ok;
    j["seconds"] = r.seconds;
    j["seed"] = r.seed;
    if (r.c_exp) j["c_exp"] = *r.c_exp;
    if (r.gamma_exp) j["gamma_exp"] = *r.gamma_exp;
    if (r.ok)
      j["report"] = json::parse(evaluation::report_to_json(r.report));
    else
      j["error"] = r.error;
    out << j.dump() << "\n";
  }
}

std::vector<ExperimentResult> load_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open results file: " + path);
  std::vector<ExperimentResult> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      json j = json::parse(line);
      ExperimentResult r;
      r.descriptor = j.at("descriptor").get<std::string>();
      r.ok = j.at("ok").get<bool>();
      r.seconds = j.at("seconds").get<double>();
      r.seed = j.at("seed").get<std::uint64_t>();
      if (j.contains("c_exp")) r.c_exp = j.at("c_exp").get<int>();
      if (j.contains("gamma_exp")) r.gamma_exp = j.at("gamma_exp").get<int>();
      if (r.ok)
        r.report = evaluation::report_from_json(j.at("report").dump());
      else
        r.error = j.value("error", "");
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace relnet::harness
