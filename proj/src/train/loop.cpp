#include "harc/train/loop.hpp"

#include "harc/error.hpp"
#include "harc/eval/ranking.hpp"
#include "harc/io/checkpoint.hpp"
#include "harc/model/encoders.hpp"
#include "harc/model/params.hpp"
#include "harc/train/batch.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace harc::train {

namespace {

double validation_metric(const numerics::ParameterStore<float>& store,
                         const model::ModelConfig& cfg, const io::PreparedData& data) {
  if (cfg.task == model::Task::rating)
    return eval::evaluate_rating(store, cfg, data, data.valid);
  eval::ModelScorer scorer(store, cfg, data);
  return eval::rank_cases(data.val_cases, std::cref(scorer), 10).hr;
}

bool improves(model::Task task, double candidate, double best) {
  return task == model::Task::rating ? candidate < best : candidate > best;
}

}  // namespace

TrainReport train(const model::ModelConfig& cfg, const io::PreparedData& data,
                  const TrainOptions& opts, numerics::ParameterStore<float>* out_store) {
  cfg.validate();
  if (cfg.task == model::Task::rating && data.valid.interactions.empty())
    throw ValidationError("rating task needs a validation split");
  if (cfg.task == model::Task::ranking && data.val_cases.empty())
    throw ValidationError("ranking task needs validation cases");
  if (cfg.use_pretrained_words && data.word_vectors.dim() != cfg.word_dim)
    throw ValidationError(
        "prepared word vectors have dim " + std::to_string(data.word_vectors.dim()) +
        " but word_dim is " + std::to_string(cfg.word_dim) +
        " (re-prep or pass use_pretrained_words=false)");

  auto store = model::init_parameters<float>(
      cfg, data.n_users(), data.n_items(), data.vocab.size(), opts.seed,
      cfg.use_pretrained_words ? &data.word_vectors : nullptr);
  corpus::HistoryIndex index(data.train);

  numerics::AdamConfig adam;
  adam.lr = opts.lr;

  std::ofstream log;
  if (!opts.out_dir.empty()) {
    std::filesystem::create_directories(opts.out_dir);
    log.open(opts.out_dir + "/train.log", std::ios::trunc);
  }
  auto say = [&](const std::string& line) {
    if (log.is_open()) log << line << "\n" << std::flush;
    if (!opts.quiet) std::cout << line << "\n";
  };

  TrainReport report;
  numerics::ParameterStore<float> best_store = store;
  double best_metric = cfg.task == model::Task::rating
                           ? std::numeric_limits<double>::infinity()
                           : -std::numeric_limits<double>::infinity();
  int since_best = 0;

  for (int epoch = 1; epoch <= opts.max_epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    BatchStream stream(data.train, index, data.docs, cfg, opts.batch_size,
                       opts.train_negatives, opts.seed, epoch);
    double loss_sum = 0.0;
    i64 n_batches = 0;
    while (auto batch = stream.next()) {
      store.zero_grads();
      const float loss =
          model::forward_backward(store, batch->histories, batch->profiles,
                                  batch->targets, cfg);
      if (!std::isfinite(loss))
        throw NumericError("NaN/Inf loss at epoch " + std::to_string(epoch) + " batch " +
                           std::to_string(n_batches + 1));
      numerics::adam_step(store, adam);
      loss_sum += static_cast<double>(loss);
      ++n_batches;
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(n_batches);
    rec.val_metric = validation_metric(store, cfg, data);
    if (opts.eval_train_rmse)
      rec.train_rmse = eval::evaluate_rating(store, cfg, data, data.train);
    rec.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.epochs.push_back(rec);

    char line[192];
    std::snprintf(line, sizeof(line), "epoch %d  train_loss %.6f  val_%s %.6f  (%.2fs)",
                  epoch, rec.train_loss,
                  cfg.task == model::Task::rating ? "rmse" : "hr10", rec.val_metric,
                  rec.seconds);
    say(line);

    if (improves(cfg.task, rec.val_metric, best_metric)) {
      best_metric = rec.val_metric;
      report.best_epoch = epoch;
      best_store = store;
      since_best = 0;
    } else {
      ++since_best;
      if (opts.patience > 0 && since_best >= opts.patience) {
        say("early stop: no improvement for " + std::to_string(opts.patience) + " epochs");
        break;
      }
    }
  }

  if (!opts.out_dir.empty()) {
    report.checkpoint_path = opts.out_dir + "/checkpoint.harc";
    io::save_checkpoint(report.checkpoint_path, best_store, cfg, data.n_users(),
                        data.n_items(), data.vocab.size());
    std::ofstream metrics(opts.out_dir + "/metrics.tsv", std::ios::trunc);
    if (!metrics) throw IoError("cannot write metrics file");
    metrics << "epoch\ttrain_loss\tval_metric\tseconds\n";
    for (const auto& r : report.epochs) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "%d\t%.9g\t%.9g\t%.3f\n", r.epoch, r.train_loss,
                    r.val_metric, r.seconds);
      metrics << buf;
    }
  }
  if (out_store) *out_store = std::move(best_store);
  return report;
}

}  // namespace harc::train
