#include "harc/io/checkpoint.hpp"
#include "harc/io/crc32.hpp"
#include "harc/io/runconfig.hpp"
#include "harc/io/tables.hpp"

#include <doctest.h>

#include "support/synthetic.hpp"

#include <cstdio>
#include <fstream>

using namespace harc;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

void spit(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("crc32 matches the reference vector") {
  const char* s = "123456789";
  CHECK(io::crc32_of(s, 9) == 0xCBF43926u);
  io::Crc32 inc;
  inc.update("1234", 4);
  inc.update("56789", 5);
  CHECK(inc.value() == 0xCBF43926u);
}

TEST_CASE("checkpoint round-trip is bit-exact") {
  auto cfg = synth::tiny_config();
  auto store = model::init_parameters<float>(cfg, 4, 5, 7, 99);
  const std::string dir = synth::fresh_temp_dir("ckpt");
  const std::string path = dir + "/model.harc";
  io::save_checkpoint(path, store, cfg, 4, 5, 7);

  auto loaded = io::load_checkpoint(path);
  CHECK(loaded.n_users == 4);
  CHECK(loaded.n_items == 5);
  CHECK(loaded.vocab_words == 7);
  CHECK(loaded.cfg.d_latent == cfg.d_latent);
  CHECK(loaded.cfg.window_sizes == cfg.window_sizes);
  CHECK(numerics::values_equal(store, loaded.store));

  // sidecar text exists and names the task
  auto side = slurp(path + ".cfg");
  CHECK(side.find("task = rating") != std::string::npos);

  // saving the loaded store reproduces the same bytes
  const std::string path2 = dir + "/model2.harc";
  io::save_checkpoint(path2, loaded.store, loaded.cfg, 4, 5, 7);
  CHECK(slurp(path) == slurp(path2));
}

TEST_CASE("checkpoint corruption and versioning are rejected") {
  auto cfg = synth::tiny_config();
  auto store = model::init_parameters<float>(cfg, 4, 5, 7, 99);
  const std::string dir = synth::fresh_temp_dir("ckpt_bad");
  const std::string path = dir + "/model.harc";
  io::save_checkpoint(path, store, cfg, 4, 5, 7);
  const std::string good = slurp(path);

  SUBCASE("truncated file") {
    spit(path, good.substr(0, good.size() / 2));
    CHECK_THROWS_AS(io::load_checkpoint(path), CorruptionError);
  }
  SUBCASE("flipped payload byte breaks the CRC") {
    std::string bad = good;
    bad[bad.size() / 2] = static_cast<char>(bad[bad.size() / 2] ^ 0x40);
    spit(path, bad);
    CHECK_THROWS_AS(io::load_checkpoint(path), CorruptionError);
  }
  SUBCASE("future version is an explicit unsupported-version error") {
    std::string bad = good;
    bad[4] = 9;  // version lives right after the magic
    // re-seal the CRC so only the version check can fire
    const u32 crc = io::crc32_of(bad.data(), bad.size() - 4);
    for (int i = 0; i < 4; ++i)
      bad[bad.size() - 4 + static_cast<std::size_t>(i)] =
          static_cast<char>((crc >> (8 * i)) & 0xFF);
    spit(path, bad);
    try {
      io::load_checkpoint(path);
      FAIL("expected CorruptionError");
    } catch (const CorruptionError& e) {
      CHECK(std::string(e.what()).find("version") != std::string::npos);
    }
  }
  SUBCASE("bad magic") {
    std::string bad = good;
    bad[0] = 'X';
    const u32 crc = io::crc32_of(bad.data(), bad.size() - 4);
    for (int i = 0; i < 4; ++i)
      bad[bad.size() - 4 + static_cast<std::size_t>(i)] =
          static_cast<char>((crc >> (8 * i)) & 0xFF);
    spit(path, bad);
    CHECK_THROWS_AS(io::load_checkpoint(path), CorruptionError);
  }
}

TEST_CASE("table container round-trips f32 and i64 payloads") {
  const std::string dir = synth::fresh_temp_dir("tables");
  io::TableFile tables;
  io::MatI64 m(2, 3);
  m << 1, -2, 3000000000LL, 4, 5, 978300760;
  tables["ints"] = io::Table{m, 2};
  MatF f(1, 4);
  f << 0.5f, -1.25f, 3.0f, 1e-30f;
  tables["floats"] = io::Table{f, 2};
  io::save_tables(dir + "/t.bin", tables);

  auto loaded = io::load_tables(dir + "/t.bin");
  REQUIRE(loaded.count("ints"));
  REQUIRE(loaded.count("floats"));
  const auto& mi = std::get<io::MatI64>(loaded.at("ints").data);
  CHECK(mi(0, 2) == 3000000000LL);
  CHECK(mi(1, 2) == 978300760);
  const auto& mf = std::get<MatF>(loaded.at("floats").data);
  CHECK(mf(0, 1) == -1.25f);
  CHECK(mf(0, 3) == 1e-30f);
}

TEST_CASE("runconfig: parsing, overrides, unknown keys") {
  const std::string dir = synth::fresh_temp_dir("cfg");
  const std::string path = dir + "/run.cfg";
  spit(path,
       "# comment\n"
       "d_latent = 16\n"
       "pooling = mean\n"
       "mlp_layers = 8,4,1\n"
       "lr = 0.005\n"
       "task = ranking\n");
  auto cfg = io::parse_runconfig_file(path);
  CHECK(cfg.model.d_latent == 16);
  CHECK(cfg.model.pooling == model::Pooling::mean);
  CHECK(cfg.model.mlp_layers == std::vector<int>{8, 4, 1});
  CHECK(cfg.lr == doctest::Approx(0.005));
  CHECK(cfg.model.task == model::Task::ranking);

  SUBCASE("flag overrides win over the file") {
    auto merged = io::apply_overrides(cfg, {{"pooling", "max"}, {"seed", "9"}});
    CHECK(merged.model.pooling == model::Pooling::max);
    CHECK(merged.seed == 9);
    CHECK(merged.model.d_latent == 16);
  }
  SUBCASE("unknown keys error out") {
    spit(path, "d_latnet = 16\n");  // typo
    CHECK_THROWS_AS(io::parse_runconfig_file(path), UsageError);
  }
  SUBCASE("resolved text re-parses to the same config") {
    const std::string round = dir + "/resolved.cfg";
    io::write_resolved_config(round, cfg);
    auto back = io::parse_runconfig_file(round);
    CHECK(back.resolved_text() == cfg.resolved_text());
  }
}

}  // TEST_SUITE
