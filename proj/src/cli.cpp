#include "relnet/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "relnet/harness.hpp"
#include "relnet/synthetic.hpp"

namespace relnet::cli {

using nlohmann::json;

namespace {

// Every tunable of the pipeline with its default. A JSON config file may set
// any subset (unknown keys are rejected); command-line flags win over the
// file.
struct RunConfig {
  int seq_len = 100;
  int clip = 50;
  int max_word_len = 25;
  int min_count = 1;
  std::string unlabeled_policy = "assume_false";  // or "error"

  int word_dim = 100;
  int position_dim = 50;
  int postag_dim = 50;
  bool char_enabled = false;
  int char_dim = 30;
  int char_filters = 50;
  int char_window = 3;
  bool word_trainable = false;

  std::string topology = "cnn";  // cnn | lstm | bilstm
  std::vector<int> cnn_windows = {2, 3, 4};
  int cnn_filters = 150;
  int lstm_hidden = 200;
  double dropout = 0.25;

  int epochs = 2;
  int batch_size = 32;
  double lr = 0.001;

  double svm_c = 1.0;
  double svm_gamma = 0.1;
  double svm_tol = 1e-3;
  int svm_max_passes = 10;
  int svm_max_sweeps = 1000;

  int svm_c_exp_lo = -3, svm_c_exp_hi = 6;
  int svm_gamma_exp_lo = -3, svm_gamma_exp_hi = 6;

  int synth_sentences = 2000;
  double dev_fraction = 0.1;
  std::string select_on = "dev";  // or "test"

  std::uint64_t seed = 42;
  int workers = 1;
};

std::uint64_t default_seed() {
  if (const char* env = std::getenv("RELNET_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0') return v;
    throw DataError("RELNET_SEED is not an integer: " + std::string(env));
  }
  return 42;
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("malformed config file " + path + ": " + e.what());
  }
  if (!j.is_object()) throw DataError("config file " + path + " must hold a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "seq_len") cfg.seq_len = value.get<int>();
      else if (key == "clip") cfg.clip = value.get<int>();
      else if (key == "max_word_len") cfg.max_word_len = value.get<int>();
      else if (key == "min_count") cfg.min_count = value.get<int>();
      else if (key == "unlabeled_policy") cfg.unlabeled_policy = value.get<std::string>();
      else if (key == "word_dim") cfg.word_dim = value.get<int>();
      else if (key == "position_dim") cfg.position_dim = value.get<int>();
      else if (key == "postag_dim") cfg.postag_dim = value.get<int>();
      else if (key == "char_enabled") cfg.char_enabled = value.get<bool>();
      else if (key == "char_dim") cfg.char_dim = value.get<int>();
      else if (key == "char_filters") cfg.char_filters = value.get<int>();
      else if (key == "char_window") cfg.char_window = value.get<int>();
      else if (key == "word_trainable") cfg.word_trainable = value.get<bool>();
      else if (key == "topology") cfg.topology = value.get<std::string>();
      else if (key == "cnn_windows") cfg.cnn_windows = value.get<std::vector<int>>();
      else if (key == "cnn_filters") cfg.cnn_filters = value.get<int>();
      else if (key == "lstm_hidden") cfg.lstm_hidden = value.get<int>();
      else if (key == "dropout") cfg.dropout = value.get<double>();
      else if (key == "epochs") cfg.epochs = value.get<int>();
      else if (key == "batch_size") cfg.batch_size = value.get<int>();
      else if (key == "lr") cfg.lr = value.get<double>();
      else if (key == "svm_c") cfg.svm_c = value.get<double>();
      else if (key == "svm_gamma") cfg.svm_gamma = value.get<double>();
      else if (key == "svm_tol") cfg.svm_tol = value.get<double>();
      else if (key == "svm_max_passes") cfg.svm_max_passes = value.get<int>();
      else if (key == "svm_max_sweeps") cfg.svm_max_sweeps = value.get<int>();
      else if (key == "svm_c_exp_lo") cfg.svm_c_exp_lo = value.get<int>();
      else if (key == "svm_c_exp_hi") cfg.svm_c_exp_hi = value.get<int>();
      else if (key == "svm_gamma_exp_lo") cfg.svm_gamma_exp_lo = value.get<int>();
      else if (key == "svm_gamma_exp_hi") cfg.svm_gamma_exp_hi = value.get<int>();
      else if (key == "synth_sentences") cfg.synth_sentences = value.get<int>();
      else if (key == "dev_fraction") cfg.dev_fraction = value.get<double>();
      else if (key == "select_on") cfg.select_on = value.get<std::string>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "workers") cfg.workers = value.get<int>();
      else throw DataError("config file " + path + ": unknown key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw DataError("config file " + path + ": " + e.what());
  }
}

frontnet::Topology topology_of(const std::string& name) {
  if (name == "cnn") return frontnet::Topology::Cnn;
  if (name == "lstm") return frontnet::Topology::Lstm;
  if (name == "bilstm") return frontnet::Topology::Bilstm;
  throw DataError("unknown topology '" + name + "' (expected cnn, lstm or bilstm)");
}

corpus::UnlabeledPolicy policy_of(const std::string& name) {
  if (name == "assume_false") return corpus::UnlabeledPolicy::AssumeFalse;
  if (name == "error") return corpus::UnlabeledPolicy::Error;
  throw DataError("unknown unlabeled policy '" + name + "' (expected assume_false or error)");
}

corpus::EncodeOptions encode_options(const RunConfig& cfg) {
  return {cfg.seq_len, cfg.clip, cfg.max_word_len};
}

optim::NetworkConfig network_config(const RunConfig& cfg, const corpus::Vocabulary& vocab) {
  optim::NetworkConfig nc;
  nc.encode = encode_options(cfg);
  nc.feature.word_dim = cfg.word_dim;
  nc.feature.position_dim = cfg.position_dim;
  nc.feature.postag_dim = cfg.postag_dim;
  nc.feature.char_conv.enabled = cfg.char_enabled;
  nc.feature.char_conv.char_dim = cfg.char_dim;
  nc.feature.char_conv.char_filters = cfg.char_filters;
  nc.feature.char_conv.char_window = cfg.char_window;
  nc.topology = topology_of(cfg.topology);
  nc.cnn_windows = cfg.cnn_windows;
  nc.cnn_filters = cfg.cnn_filters;
  nc.lstm_hidden = cfg.lstm_hidden;
  nc.dropout_rate = cfg.dropout;
  nc.word_trainable = cfg.word_trainable;
  nc.word_vocab = static_cast<int>(vocab.word_count());
  nc.pos_vocab = static_cast<int>(vocab.pos_count());
  nc.char_vocab = static_cast<int>(vocab.char_count());
  return nc;
}

std::vector<corpus::Label> load_predictions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open predictions file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("malformed predictions file " + path + ": " + e.what());
  }
  if (!j.is_array()) throw DataError("predictions file " + path + " must hold a JSON array");
  std::vector<corpus::Label> out;
  for (const auto& v : j) {
    if (!v.is_boolean()) throw DataError("predictions file " + path + ": entries must be booleans");
    out.push_back(v.get<bool>() ? corpus::Label::True : corpus::Label::False);
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  out << text;
  if (!text.empty() && text.back() != '\n') out << "\n";
}

struct CommonFlags {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int workers = 0;
  bool workers_given = false;
};

void add_common(CLI::App* sub, CommonFlags& flags) {
  sub->add_option("--config", flags.config_path, "JSON config file; flags override its values");
  auto* seed_opt = sub->add_option("--seed", flags.seed,
                                   "root seed; RELNET_SEED or 42 when absent");
  auto* workers_opt = sub->add_option("--workers", flags.workers, "worker threads for sweeps");
  sub->parse_complete_callback([&flags, seed_opt, workers_opt] {
    flags.seed_given = seed_opt->count() > 0;
    flags.workers_given = workers_opt->count() > 0;
  });
}

RunConfig resolve_config(const CommonFlags& flags) {
  RunConfig cfg;
  cfg.seed = default_seed();
  if (!flags.config_path.empty()) apply_config_file(cfg, flags.config_path);
  if (flags.seed_given) cfg.seed = flags.seed;
  if (flags.workers_given) cfg.workers = flags.workers;
  return cfg;
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
  CLI::App app{"relnet: relation detection between entity pairs (CNN/LSTM front, dense or RBF-SVM back)"};
  app.require_subcommand(1);

  // ----- synth -----
  auto* synth = app.add_subcommand("synth", "generate a synthetic annotated corpus");
  CommonFlags synth_flags;
  std::string synth_out;
  int synth_sentences = -1;
  synth->add_option("--out", synth_out, "output corpus (JSON lines)")->required();
  synth->add_option("--sentences", synth_sentences, "number of sentences (default 2000)");
  add_common(synth, synth_flags);

  // ----- prepare -----
  auto* prepare = app.add_subcommand("prepare", "encode a corpus into instance files");
  CommonFlags prepare_flags;
  std::string prep_corpus, prep_out, prep_vocab_in, prep_vocab_out;
  prepare->add_option("--corpus", prep_corpus, "annotated corpus (JSON lines)")->required();
  prepare->add_option("--out", prep_out, "encoded instances output (JSON lines)")->required();
  prepare->add_option("--vocab", prep_vocab_in, "existing vocabulary to encode with");
  prepare->add_option("--out-vocab", prep_vocab_out, "write the vocabulary built from the corpus");
  add_common(prepare, prepare_flags);

  // ----- train -----
  auto* train_cmd = app.add_subcommand("train", "train the network with the dense softmax head");
  CommonFlags train_flags;
  std::string train_instances, train_vocab, train_embeddings, train_out;
  train_cmd->add_option("--instances", train_instances, "encoded training instances")->required();
  train_cmd->add_option("--vocab", train_vocab, "vocabulary file")->required();
  train_cmd->add_option("--embeddings", train_embeddings, "pretrained word2vec text file");
  train_cmd->add_option("--out", train_out, "checkpoint output path")->required();
  add_common(train_cmd, train_flags);

  // ----- extract -----
  auto* extract = app.add_subcommand("extract", "extract dropout-layer feature vectors");
  CommonFlags extract_flags;
  std::string ex_model, ex_instances, ex_out;
  extract->add_option("--model", ex_model, "network checkpoint")->required();
  extract->add_option("--instances", ex_instances, "encoded instances")->required();
  extract->add_option("--out", ex_out, "feature vectors output (JSON lines)")->required();
  add_common(extract, extract_flags);

  // ----- svm-train -----
  auto* svm_train = app.add_subcommand("svm-train", "train the RBF-kernel SVM on features");
  CommonFlags svm_flags;
  std::string svm_features, svm_out;
  double svm_c_flag = 0.0, svm_gamma_flag = 0.0;
  bool svm_c_given = false, svm_gamma_given = false;
  svm_train->add_option("--features", svm_features, "training feature vectors")->required();
  svm_train->add_option("--out", svm_out, "SVM model output (JSON)")->required();
  auto* c_opt = svm_train->add_option("--c", svm_c_flag, "box constraint C (default 1)");
  auto* g_opt = svm_train->add_option("--gamma", svm_gamma_flag, "RBF gamma (default 0.1)");
  svm_train->parse_complete_callback([&] {
    svm_c_given = c_opt->count() > 0;
    svm_gamma_given = g_opt->count() > 0;
  });
  add_common(svm_train, svm_flags);

  // ----- eval -----
  auto* eval_cmd = app.add_subcommand("eval", "evaluate predictions against gold labels");
  CommonFlags eval_flags;
  std::string eval_instances, eval_model, eval_svm, eval_preds, eval_report;
  eval_cmd->add_option("--instances", eval_instances, "encoded instances with gold labels")
      ->required();
  eval_cmd->add_option("--model", eval_model, "network checkpoint to predict with");
  eval_cmd->add_option("--svm", eval_svm, "SVM model applied to extracted features");
  eval_cmd->add_option("--predictions", eval_preds, "JSON array of boolean predictions");
  eval_cmd->add_option("--report", eval_report, "write the report JSON to this path");
  add_common(eval_cmd, eval_flags);

  // ----- grid-nn -----
  auto* grid_nn = app.add_subcommand("grid-nn", "grid search over network hyperparameters");
  CommonFlags grid_nn_flags;
  std::string gn_corpus, gn_test_corpus, gn_embeddings, gn_out, gn_topology = "cnn";
  std::string gn_select;
  grid_nn->add_option("--corpus", gn_corpus, "training corpus (JSON lines)")->required();
  grid_nn->add_option("--test-corpus", gn_test_corpus, "test corpus (needed for --select-on=test)");
  grid_nn->add_option("--embeddings", gn_embeddings, "pretrained word2vec text file");
  grid_nn->add_option("--topology", gn_topology, "cnn, lstm or bilstm (default cnn)");
  grid_nn->add_option("--select-on", gn_select, "dev (default) or test");
  grid_nn->add_option("--out", gn_out, "results output (JSON lines)")->required();
  add_common(grid_nn, grid_nn_flags);

  // ----- grid-svm -----
  auto* grid_svm = app.add_subcommand("grid-svm", "grid search over SVM C and gamma");
  CommonFlags grid_svm_flags;
  std::string gs_train, gs_eval, gs_out;
  grid_svm->add_option("--train-features", gs_train, "training feature vectors")->required();
  grid_svm->add_option("--eval-features", gs_eval, "evaluation feature vectors")->required();
  grid_svm->add_option("--out", gs_out, "results output (JSON lines)")->required();
  add_common(grid_svm, grid_svm_flags);

  // ----- heatmap -----
  auto* heatmap = app.add_subcommand("heatmap", "export an SVM grid as a heatmap CSV");
  CommonFlags heatmap_flags;
  std::string hm_results, hm_out;
  heatmap->add_option("--results", hm_results, "grid-svm results (JSON lines)")->required();
  heatmap->add_option("--out", hm_out, "heatmap CSV output")->required();
  add_common(heatmap, heatmap_flags);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help();
    return 1;
  }

  try {
    if (*synth) {
      RunConfig cfg = resolve_config(synth_flags);
      corpus::SyntheticSpec spec;
      spec.sentences = synth_sentences > 0 ? synth_sentences : cfg.synth_sentences;
      std::vector<corpus::Sentence> sentences = corpus::generate_synthetic_corpus(spec, cfg.seed);
      corpus::save_corpus(sentences, synth_out);
      std::cerr << "wrote " << sentences.size() << " sentences to " << synth_out << "\n";
    } else if (*prepare) {
      RunConfig cfg = resolve_config(prepare_flags);
      std::vector<corpus::Sentence> sentences = corpus::load_corpus(prep_corpus);
      corpus::Vocabulary vocab;
      if (!prep_vocab_in.empty()) {
        vocab = corpus::Vocabulary::load(prep_vocab_in);
      } else {
        vocab = corpus::build_vocabulary(sentences, cfg.min_count);
        if (!prep_vocab_out.empty()) vocab.save(prep_vocab_out);
      }
      std::vector<corpus::EncodedInstance> instances =
          corpus::encode_corpus(sentences, vocab, encode_options(cfg),
                                policy_of(cfg.unlabeled_policy));
      corpus::save_instances(instances, prep_out);
      std::cerr << "encoded " << instances.size() << " instances from " << sentences.size()
                << " sentences\n";
    } else if (*train_cmd) {
      RunConfig cfg = resolve_config(train_flags);
      corpus::Vocabulary vocab = corpus::Vocabulary::load(train_vocab);
      std::vector<corpus::EncodedInstance> data = corpus::load_instances(train_instances);
      optim::NetworkModel model = optim::build_network(network_config(cfg, vocab), cfg.seed);
      if (!train_embeddings.empty()) {
        std::vector<std::string> oov;
        features::EmbeddingTable table = features::load_word_embeddings(
            train_embeddings, vocab, derive_seed(cfg.seed, "oov"), &oov);
        optim::set_word_table(model, std::move(table));
        std::cerr << oov.size() << " vocabulary words missing from " << train_embeddings << "\n";
      }
      optim::TrainConfig tc{cfg.epochs, cfg.batch_size, cfg.lr, cfg.seed};
      optim::TrainResult tr = optim::train(model, data, tc);
      optim::save_checkpoint(model, train_out);
      std::cerr << "trained " << model.config.descriptor() << " on " << data.size()
                << " instances; epoch losses:";
      for (double l : tr.epoch_loss) std::cerr << " " << l;
      std::cerr << "\n";
    } else if (*extract) {
      resolve_config(extract_flags);
      optim::NetworkModel model = optim::load_checkpoint(ex_model);
      std::vector<corpus::EncodedInstance> data = corpus::load_instances(ex_instances);
      backnet::FeatureDataset features = backnet::extract_feature_vectors(model, data);
      backnet::save_features(features, ex_out);
      std::cerr << "extracted " << features.size() << " feature vectors of dim "
                << features.x.cols() << "\n";
    } else if (*svm_train) {
      RunConfig cfg = resolve_config(svm_flags);
      backnet::FeatureDataset data = backnet::load_features(svm_features);
      backnet::SmoOptions opts;
      opts.tol = cfg.svm_tol;
      opts.max_passes = cfg.svm_max_passes;
      opts.max_sweeps = cfg.svm_max_sweeps;
      opts.seed = cfg.seed;
      const double c = svm_c_given ? svm_c_flag : cfg.svm_c;
      const double gamma = svm_gamma_given ? svm_gamma_flag : cfg.svm_gamma;
      backnet::SmoResult result = backnet::smo_train(data, c, gamma, opts);
      backnet::save_svm(result.model, svm_out);
      std::cerr << "SMO " << (result.converged ? "converged" : "hit the sweep cap") << " after "
                << result.sweeps << " sweeps; " << result.model.dual_coefs.size()
                << " support vectors\n";
      if (!result.converged) std::cerr << "warning: model is the best iterate, not converged\n";
    } else if (*eval_cmd) {
      resolve_config(eval_flags);
      if (eval_preds.empty() && eval_model.empty())
        throw CLI::ValidationError("eval", "provide --model or --predictions");
      std::vector<corpus::EncodedInstance> data = corpus::load_instances(eval_instances);
      std::vector<corpus::Label> golds;
      golds.reserve(data.size());
      for (const corpus::EncodedInstance& inst : data) golds.push_back(inst.label);

      std::vector<corpus::Label> preds;
      if (!eval_preds.empty()) {
        preds = load_predictions(eval_preds);
        if (preds.size() != golds.size())
          throw DataError("predictions file has " + std::to_string(preds.size()) +
                          " entries, instances file has " + std::to_string(golds.size()));
      } else if (!eval_model.empty()) {
        optim::NetworkModel model = optim::load_checkpoint(eval_model);
        if (!eval_svm.empty()) {
          backnet::SvmModel svm = backnet::load_svm(eval_svm);
          backnet::FeatureDataset features = backnet::extract_feature_vectors(model, data);
          for (std::size_t i = 0; i < features.size(); ++i)
            preds.push_back(
                backnet::svm_decision(svm, features.x.row(i), features.x.cols()).label);
        } else {
          for (const corpus::EncodedInstance& inst : data)
            preds.push_back(optim::model_predict(model, inst));
        }
      }

      evaluation::EvaluationReport report = evaluation::evaluate(preds, golds);
      std::cout << evaluation::report_to_table(report);
      if (!eval_report.empty()) write_text_file(eval_report, evaluation::report_to_json(report));
    } else if (*grid_nn) {
      RunConfig cfg = resolve_config(grid_nn_flags);
      if (!gn_select.empty()) cfg.select_on = gn_select;
      cfg.topology = gn_topology;
      if (cfg.select_on != "dev" && cfg.select_on != "test")
        throw CLI::ValidationError("--select-on", "expected dev or test");

      std::vector<corpus::Sentence> all = corpus::load_corpus(gn_corpus);
      std::vector<corpus::Sentence> train_sents, eval_sents;
      if (cfg.select_on == "dev") {
        auto [rest, dev] = corpus::split_corpus(all, cfg.dev_fraction, cfg.seed);
        train_sents = std::move(rest);
        eval_sents = std::move(dev);
      } else {
        if (gn_test_corpus.empty())
          throw CLI::ValidationError("--select-on", "test selection needs --test-corpus");
        train_sents = std::move(all);
        eval_sents = corpus::load_corpus(gn_test_corpus);
      }
      corpus::Vocabulary vocab = corpus::build_vocabulary(train_sents, cfg.min_count);
      const corpus::UnlabeledPolicy policy = policy_of(cfg.unlabeled_policy);
      std::vector<corpus::EncodedInstance> train_data =
          corpus::encode_corpus(train_sents, vocab, encode_options(cfg), policy);
      std::vector<corpus::EncodedInstance> eval_data =
          corpus::encode_corpus(eval_sents, vocab, encode_options(cfg), policy);

      harness::NNGridContext ctx;
      ctx.base = network_config(cfg, vocab);
      ctx.train = optim::TrainConfig{cfg.epochs, cfg.batch_size, cfg.lr, cfg.seed};
      ctx.seed = cfg.seed;
      ctx.workers = cfg.workers;
      features::EmbeddingTable pretrained;
      if (!gn_embeddings.empty()) {
        pretrained = features::load_word_embeddings(gn_embeddings, vocab,
                                                    derive_seed(cfg.seed, "oov"));
        ctx.pretrained_words = &pretrained;
      }
      const frontnet::Topology topo = topology_of(cfg.topology);
      harness::NNGridSpec spec = topo == frontnet::Topology::Cnn
                                     ? harness::NNGridSpec::default_cnn()
                                     : harness::NNGridSpec::default_lstm(topo);
      std::vector<harness::NNConfigPoint> points = harness::enumerate_nn_grid(spec);
      std::cerr << "running " << points.size() << " configurations on " << train_data.size()
                << " train / " << eval_data.size() << " eval instances\n";
      std::vector<harness::ExperimentResult> results =
          harness::run_nn_grid(points, train_data, eval_data, ctx);
      harness::save_results(results, gn_out);
      const harness::ExperimentResult& best = harness::select_best(results);
      std::cerr << "best: " << best.descriptor << " weighted F1 " << best.report.weighted_f1
                << "\n";
    } else if (*grid_svm) {
      RunConfig cfg = resolve_config(grid_svm_flags);
      backnet::FeatureDataset train_features = backnet::load_features(gs_train);
      backnet::FeatureDataset eval_features = backnet::load_features(gs_eval);
      harness::SvmGridSpec grid{cfg.svm_c_exp_lo, cfg.svm_c_exp_hi, cfg.svm_gamma_exp_lo,
                                cfg.svm_gamma_exp_hi};
      harness::SvmGridContext ctx;
      ctx.smo.tol = cfg.svm_tol;
      ctx.smo.max_passes = cfg.svm_max_passes;
      ctx.smo.max_sweeps = cfg.svm_max_sweeps;
      ctx.seed = cfg.seed;
      ctx.workers = cfg.workers;
      std::vector<harness::ExperimentResult> results =
          harness::run_svm_grid(train_features, eval_features, grid, ctx);
      harness::save_results(results, gs_out);
      const harness::ExperimentResult& best = harness::select_best(results);
      std::cerr << "best: " << best.descriptor << " weighted F1 " << best.report.weighted_f1
                << "\n";
    } else if (*heatmap) {
      resolve_config(heatmap_flags);
      std::vector<harness::ExperimentResult> results = harness::load_results(hm_results);
      harness::export_heatmap(results, hm_out);
      std::cerr << "wrote heatmap to " << hm_out << "\n";
    }
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace relnet::cli
