#include "harc/model/config.hpp"

#include <sstream>

namespace harc::model {

std::string to_string(Pooling p) {
  switch (p) {
    case Pooling::attention: return "attention";
    case Pooling::mean: return "mean";
    case Pooling::max: return "max";
  }
  return "attention";
}

std::string to_string(Task t) { return t == Task::rating ? "rating" : "ranking"; }

Pooling pooling_from_string(const std::string& s) {
  if (s == "attention") return Pooling::attention;
  if (s == "mean") return Pooling::mean;
  if (s == "max") return Pooling::max;
  throw ValidationError("unknown pooling mode: " + s);
}

Task task_from_string(const std::string& s) {
  if (s == "rating") return Task::rating;
  if (s == "ranking") return Task::ranking;
  throw ValidationError("unknown task: " + s);
}

void ModelConfig::validate() const {
  auto positive = [](int v, const char* name) {
    if (v < 1) throw ValidationError(std::string(name) + " must be >= 1");
  };
  positive(d_item, "d_item");
  positive(d_user, "d_user");
  positive(d_rating, "d_rating");
  positive(d_attn, "d_attn");
  positive(word_dim, "word_dim");
  positive(filters_per_size, "filters_per_size");
  positive(d_doc, "d_doc");
  positive(d_latent, "d_latent");
  positive(history_len, "history_len");
  positive(doc_len, "doc_len");
  if (window_sizes.empty()) throw ValidationError("window_sizes must be nonempty");
  for (int h : window_sizes) {
    positive(h, "window size");
    if (h > doc_len)
      throw ValidationError("window size " + std::to_string(h) + " exceeds doc_len " +
                            std::to_string(doc_len));
  }
  if (mlp_layers.empty() || mlp_layers.back() != 1)
    throw ValidationError("mlp_layers must end with an output width of 1");
  for (int w : mlp_layers) positive(w, "mlp layer width");
  if (!use_user_info_in_item && !use_doc_info)
    throw ValidationError("at least one item branch (user info / doc info) must be enabled");
}

std::vector<float> encode_config(const ModelConfig& cfg, i32 n_users, i32 n_items,
                                 i32 vocab_words) {
  std::vector<float> v;
  v.push_back(1.0f);  // layout version
  auto push = [&](i64 x) { v.push_back(static_cast<float>(x)); };
  push(cfg.d_item);
  push(cfg.d_user);
  push(cfg.d_rating);
  push(cfg.d_attn);
  push(cfg.word_dim);
  push(cfg.filters_per_size);
  push(cfg.d_doc);
  push(cfg.d_latent);
  push(cfg.history_len);
  push(cfg.doc_len);
  push(cfg.use_rating_info ? 1 : 0);
  push(static_cast<i64>(cfg.pooling));
  push(cfg.use_user_info_in_item ? 1 : 0);
  push(cfg.use_doc_info ? 1 : 0);
  push(cfg.use_pretrained_words ? 1 : 0);
  push(static_cast<i64>(cfg.task));
  push(n_users);
  push(n_items);
  push(vocab_words);
  push(static_cast<i64>(cfg.window_sizes.size()));
  for (int h : cfg.window_sizes) push(h);
  push(static_cast<i64>(cfg.mlp_layers.size()));
  for (int w : cfg.mlp_layers) push(w);
  return v;
}

DecodedConfig decode_config(const std::vector<float>& data) {
  std::size_t pos = 0;
  auto next = [&]() -> i64 {
    if (pos >= data.size()) throw CorruptionError("config tensor truncated");
    return static_cast<i64>(data[pos++]);
  };
  if (next() != 1) throw CorruptionError("unsupported config tensor layout");
  DecodedConfig out;
  ModelConfig& c = out.cfg;
  c.d_item = static_cast<int>(next());
  c.d_user = static_cast<int>(next());
  c.d_rating = static_cast<int>(next());
  c.d_attn = static_cast<int>(next());
  c.word_dim = static_cast<int>(next());
  c.filters_per_size = static_cast<int>(next());
  c.d_doc = static_cast<int>(next());
  c.d_latent = static_cast<int>(next());
  c.history_len = static_cast<int>(next());
  c.doc_len = static_cast<int>(next());
  c.use_rating_info = next() != 0;
  c.pooling = static_cast<Pooling>(next());
  c.use_user_info_in_item = next() != 0;
  c.use_doc_info = next() != 0;
  c.use_pretrained_words = next() != 0;
  c.task = static_cast<Task>(next());
  out.n_users = static_cast<i32>(next());
  out.n_items = static_cast<i32>(next());
  out.vocab_words = static_cast<i32>(next());
  c.window_sizes.clear();
  for (i64 n = next(); n > 0; --n) c.window_sizes.push_back(static_cast<int>(next()));
  c.mlp_layers.clear();
  for (i64 n = next(); n > 0; --n) c.mlp_layers.push_back(static_cast<int>(next()));
  c.validate();
  return out;
}

std::string config_text(const ModelConfig& cfg, i32 n_users, i32 n_items, i32 vocab_words) {
  std::ostringstream os;
  auto list = [](const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(v[i]);
    }
    return s;
  };
  os << "d_item = " << cfg.d_item << "\n";
  os << "d_user = " << cfg.d_user << "\n";
  os << "d_rating = " << cfg.d_rating << "\n";
  os << "d_attn = " << cfg.d_attn << "\n";
  os << "word_dim = " << cfg.word_dim << "\n";
  os << "window_sizes = " << list(cfg.window_sizes) << "\n";
  os << "filters_per_size = " << cfg.filters_per_size << "\n";
  os << "d_doc = " << cfg.d_doc << "\n";
  os << "d_latent = " << cfg.d_latent << "\n";
  os << "mlp_layers = " << list(cfg.mlp_layers) << "\n";
  os << "history_len = " << cfg.history_len << "\n";
  os << "doc_len = " << cfg.doc_len << "\n";
  os << "use_rating_info = " << (cfg.use_rating_info ? "true" : "false") << "\n";
  os << "pooling = " << to_string(cfg.pooling) << "\n";
  os << "use_user_info_in_item = " << (cfg.use_user_info_in_item ? "true" : "false") << "\n";
  os << "use_doc_info = " << (cfg.use_doc_info ? "true" : "false") << "\n";
  os << "use_pretrained_words = " << (cfg.use_pretrained_words ? "true" : "false") << "\n";
  os << "task = " << to_string(cfg.task) << "\n";
  os << "n_users = " << n_users << "\n";
  os << "n_items = " << n_items << "\n";
  os << "vocab_words = " << vocab_words << "\n";
  return os.str();
}

}  // namespace harc::model
