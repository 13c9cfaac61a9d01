#include "harc/io/runconfig.hpp"

#include "harc/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace harc::io {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw UsageError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

i64 parse_int(const std::string& v, const std::string& key) {
  i64 out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw UsageError("config key '" + key + "': expected an integer, got '" + v + "'");
  return out;
}

double parse_double(const std::string& v, const std::string& key) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw UsageError("config key '" + key + "': expected a number, got '" + v + "'");
  }
}

std::vector<int> parse_int_list(const std::string& v, const std::string& key) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string part;
  while (std::getline(ss, part, ',')) {
    part = trim(part);
    if (!part.empty()) out.push_back(static_cast<int>(parse_int(part, key)));
  }
  if (out.empty()) throw UsageError("config key '" + key + "': empty list");
  return out;
}

std::string list_text(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s;
}

}  // namespace

void RunConfig::apply(const std::string& key, const std::string& value) {
  auto& m = model;
  if (key == "d_item") m.d_item = static_cast<int>(parse_int(value, key));
  else if (key == "d_user") m.d_user = static_cast<int>(parse_int(value, key));
  else if (key == "d_rating") m.d_rating = static_cast<int>(parse_int(value, key));
  else if (key == "d_attn") m.d_attn = static_cast<int>(parse_int(value, key));
  else if (key == "word_dim") m.word_dim = static_cast<int>(parse_int(value, key));
  else if (key == "window_sizes") m.window_sizes = parse_int_list(value, key);
  else if (key == "filters_per_size") m.filters_per_size = static_cast<int>(parse_int(value, key));
  else if (key == "d_doc") m.d_doc = static_cast<int>(parse_int(value, key));
  else if (key == "d_latent") m.d_latent = static_cast<int>(parse_int(value, key));
  else if (key == "mlp_layers") m.mlp_layers = parse_int_list(value, key);
  else if (key == "history_len") m.history_len = static_cast<int>(parse_int(value, key));
  else if (key == "doc_len") m.doc_len = static_cast<int>(parse_int(value, key));
  else if (key == "use_rating_info") m.use_rating_info = parse_bool(value, key);
  else if (key == "pooling") m.pooling = model::pooling_from_string(value);
  else if (key == "use_user_info_in_item") m.use_user_info_in_item = parse_bool(value, key);
  else if (key == "use_doc_info") m.use_doc_info = parse_bool(value, key);
  else if (key == "use_pretrained_words") m.use_pretrained_words = parse_bool(value, key);
  else if (key == "task") m.task = model::task_from_string(value);
  else if (key == "ratings") ratings_path = value;
  else if (key == "docs") docs_path = value;
  else if (key == "stopwords") stopwords_path = value;
  else if (key == "wordvecs") wordvecs_path = value;
  else if (key == "ratings_format") ratings_format = value;
  else if (key == "seed") seed = static_cast<u64>(parse_int(value, key));
  else if (key == "epochs") epochs = static_cast<int>(parse_int(value, key));
  else if (key == "patience") patience = static_cast<int>(parse_int(value, key));
  else if (key == "lr") lr = parse_double(value, key);
  else if (key == "batch_size") batch_size = static_cast<int>(parse_int(value, key));
  else if (key == "train_negatives") train_negatives = static_cast<int>(parse_int(value, key));
  else if (key == "v_max") v_max = static_cast<i32>(parse_int(value, key));
  else if (key == "min_user_ratings") min_user_ratings = static_cast<i32>(parse_int(value, key));
  else if (key == "n_negatives") n_negatives = static_cast<i32>(parse_int(value, key));
  else if (key == "frac_train") frac_train = parse_double(value, key);
  else if (key == "frac_valid") frac_valid = parse_double(value, key);
  else if (key == "k") k = static_cast<int>(parse_int(value, key));
  else throw UsageError("unknown config key: '" + key + "'");
}

std::string RunConfig::resolved_text() const {
  std::ostringstream os;
  os << "batch_size = " << batch_size << "\n";
  os << "d_attn = " << model.d_attn << "\n";
  os << "d_doc = " << model.d_doc << "\n";
  os << "d_item = " << model.d_item << "\n";
  os << "d_latent = " << model.d_latent << "\n";
  os << "d_rating = " << model.d_rating << "\n";
  os << "d_user = " << model.d_user << "\n";
  os << "doc_len = " << model.doc_len << "\n";
  os << "docs = " << docs_path << "\n";
  os << "epochs = " << epochs << "\n";
  os << "filters_per_size = " << model.filters_per_size << "\n";
  os << "frac_train = " << frac_train << "\n";
  os << "frac_valid = " << frac_valid << "\n";
  os << "history_len = " << model.history_len << "\n";
  os << "k = " << k << "\n";
  os << "lr = " << lr << "\n";
  os << "min_user_ratings = " << min_user_ratings << "\n";
  os << "mlp_layers = " << list_text(model.mlp_layers) << "\n";
  os << "n_negatives = " << n_negatives << "\n";
  os << "patience = " << patience << "\n";
  os << "pooling = " << model::to_string(model.pooling) << "\n";
  os << "ratings = " << ratings_path << "\n";
  os << "ratings_format = " << ratings_format << "\n";
  os << "seed = " << seed << "\n";
  os << "stopwords = " << stopwords_path << "\n";
  os << "task = " << model::to_string(model.task) << "\n";
  os << "train_negatives = " << train_negatives << "\n";
  os << "use_doc_info = " << (model.use_doc_info ? "true" : "false") << "\n";
  os << "use_pretrained_words = " << (model.use_pretrained_words ? "true" : "false") << "\n";
  os << "use_rating_info = " << (model.use_rating_info ? "true" : "false") << "\n";
  os << "use_user_info_in_item = " << (model.use_user_info_in_item ? "true" : "false") << "\n";
  os << "v_max = " << v_max << "\n";
  os << "window_sizes = " << list_text(model.window_sizes) << "\n";
  os << "word_dim = " << model.word_dim << "\n";
  os << "wordvecs = " << wordvecs_path << "\n";
  return os.str();
}

RunConfig parse_runconfig_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    base.apply(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

RunConfig apply_overrides(RunConfig base, const std::map<std::string, std::string>& kv) {
  for (const auto& [key, value] : kv) base.apply(key, value);
  return base;
}

void write_resolved_config(const std::string& path, const RunConfig& cfg) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write resolved config: " + path);
  out << cfg.resolved_text();
}

}  // namespace harc::io
