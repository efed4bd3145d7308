// Exercises the shared library strictly through its C surface: this binary
// links against the shared object and includes only the public C header.
#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "memeclf.h"

namespace {

// Minimal scratch dir on std:: facilities only, so this test file has no
// dependency on the C++ core.
class ScratchDir {
public:
    explicit ScratchDir(const std::string& tag) {
        const auto base = std::filesystem::temp_directory_path();
        auto stamp = static_cast<unsigned long long>(
            std::chrono::steady_clock::now().time_since_epoch().count());
        for (int attempt = 0; attempt < 64; ++attempt, ++stamp) {
            auto candidate = base / ("memeclf_capi_" + tag + "_" + std::to_string(stamp));
            std::error_code ec;
            if (std::filesystem::create_directory(candidate, ec)) {
                path_ = candidate;
                return;
            }
        }
        throw std::runtime_error("could not create scratch dir");
    }
    ~ScratchDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    ScratchDir(const ScratchDir&) = delete;
    ScratchDir& operator=(const ScratchDir&) = delete;

    std::string str(const std::string& rel = "") const {
        return rel.empty() ? path_.string() : (path_ / rel).string();
    }

private:
    std::filesystem::path path_;
};

void put_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << text;
}

// RAII for the opaque handle.
struct Handle {
    memeclf_config* cfg = memeclf_config_create();
    ~Handle() { memeclf_config_destroy(cfg); }
    operator memeclf_config*() const { return cfg; }
};

} // namespace

TEST_SUITE("capi") {

TEST_CASE("the library reports a version") {
    REQUIRE(memeclf_version() != nullptr);
    CHECK(std::string(memeclf_version()) == "0.1.0");
}

TEST_CASE("config handles set, get, override and reject nulls") {
    Handle cfg;
    REQUIRE(cfg.cfg != nullptr);

    CHECK(memeclf_config_set(cfg, "a.b", "3") == MEMECLF_OK);
    REQUIRE(memeclf_config_get(cfg, "a.b") != nullptr);
    CHECK(std::string(memeclf_config_get(cfg, "a.b")) == "3");
    CHECK(memeclf_config_get(cfg, "missing.key") == nullptr);

    CHECK(memeclf_config_set(cfg, "a.b", "4") == MEMECLF_OK); // later set wins
    CHECK(std::string(memeclf_config_get(cfg, "a.b")) == "4");

    CHECK(memeclf_config_set(cfg, "   ", "x") == MEMECLF_E_CONFIG); // blank key
    CHECK(std::string(memeclf_last_error()).size() > 0);

    CHECK(memeclf_config_set(nullptr, "k", "v") == MEMECLF_E_CONFIG);
    CHECK(std::string(memeclf_last_error()) == "null argument");
    CHECK(memeclf_config_set(cfg, nullptr, "v") == MEMECLF_E_CONFIG);
    CHECK(memeclf_config_set(cfg, "k", nullptr) == MEMECLF_E_CONFIG);
    CHECK(memeclf_config_get(nullptr, "k") == nullptr);
    CHECK(memeclf_config_get(cfg, nullptr) == nullptr);
    CHECK(memeclf_config_load_file(cfg, nullptr) == MEMECLF_E_CONFIG);
    CHECK(memeclf_run(nullptr, cfg, nullptr) == MEMECLF_E_CONFIG);
    CHECK(memeclf_run("split", nullptr, nullptr) == MEMECLF_E_CONFIG);

    memeclf_config_destroy(nullptr); // safe no-op
}

TEST_CASE("config files load and report parse failures with positions") {
    ScratchDir tmp("cfg");
    Handle cfg;

    put_file(tmp.str("good.cfg"), "# comment\nsynth.count = 6\nsynth.seed=3\n");
    CHECK(memeclf_config_load_file(cfg, tmp.str("good.cfg").c_str()) == MEMECLF_OK);
    REQUIRE(memeclf_config_get(cfg, "synth.count") != nullptr);
    CHECK(std::string(memeclf_config_get(cfg, "synth.count")) == "6");
    CHECK(std::string(memeclf_config_get(cfg, "synth.seed")) == "3");

    put_file(tmp.str("bad.cfg"), "fine = 1\nnot a key value pair\n");
    CHECK(memeclf_config_load_file(cfg, tmp.str("bad.cfg").c_str()) == MEMECLF_E_CONFIG);
    const std::string err = memeclf_last_error();
    CHECK(err.find("bad.cfg") != std::string::npos);
    CHECK(err.find("line 2") != std::string::npos);

    CHECK(memeclf_config_load_file(cfg, tmp.str("absent.cfg").c_str()) == MEMECLF_E_CONFIG);
}

TEST_CASE("a full command runs through the C boundary") {
    ScratchDir tmp("run");
    Handle cfg;
    REQUIRE(memeclf_config_set(cfg, "synth.count", "6") == MEMECLF_OK);
    REQUIRE(memeclf_config_set(cfg, "synth.seed", "3") == MEMECLF_OK);
    REQUIRE(memeclf_config_set(cfg, "synth.image_side", "16") == MEMECLF_OK);

    const std::string out = tmp.str("corpus");
    REQUIRE(memeclf_run("synthesize-corpus", cfg, out.c_str()) == MEMECLF_OK);
    CHECK(std::string(memeclf_last_error()).empty());

    namespace fs = std::filesystem;
    CHECK(fs::exists(fs::path(out) / "corpus.tsv"));
    CHECK(fs::exists(fs::path(out) / "manifest.json"));
    CHECK(fs::exists(fs::path(out) / "meme_0.png"));

    SUBCASE("the manifest records a completed run") {
        std::ifstream in(fs::path(out) / "manifest.json");
        std::ostringstream buf;
        buf << in.rdbuf();
        const std::string manifest = buf.str();
        CHECK(manifest.find("\"status\": \"complete\"") != std::string::npos);
        CHECK(manifest.find("\"command\": \"synthesize-corpus\"") != std::string::npos);
    }
}

TEST_CASE("status codes carry the error category across the boundary") {
    ScratchDir tmp("codes");
    SUBCASE("unknown command is a config error") {
        Handle cfg;
        CHECK(memeclf_run("launch-missiles", cfg, tmp.str("o").c_str()) == MEMECLF_E_CONFIG);
        CHECK(std::string(memeclf_last_error()).find("launch-missiles") != std::string::npos);
    }
    SUBCASE("a missing required key is a config error naming the key") {
        Handle cfg;
        CHECK(memeclf_run("split", cfg, tmp.str("o").c_str()) == MEMECLF_E_CONFIG);
        CHECK(std::string(memeclf_last_error()).find("data.train") != std::string::npos);
    }
    SUBCASE("an unreadable corpus is a data error") {
        Handle cfg;
        REQUIRE(memeclf_config_set(cfg, "data.train", tmp.str("nowhere.tsv").c_str()) ==
                MEMECLF_OK);
        CHECK(memeclf_run("split", cfg, tmp.str("o").c_str()) == MEMECLF_E_DATA);
        CHECK(std::string(memeclf_last_error()).find("nowhere.tsv") != std::string::npos);
    }
    SUBCASE("mismatched prediction and gold ids are an alignment error") {
        put_file(tmp.str("gold.tsv"),
                 "file_name\ttext\tmisogynous\tshaming\tstereotype\tobjectification\tviolence\n"
                 "a.png\thello\t1\t0\t0\t0\t0\n");
        put_file(tmp.str("pred.tsv"), "sample_id\tmisogynous\nb.png\t0.900000\n");
        Handle cfg;
        REQUIRE(memeclf_config_set(cfg, "eval.pred", tmp.str("pred.tsv").c_str()) == MEMECLF_OK);
        REQUIRE(memeclf_config_set(cfg, "eval.gold", tmp.str("gold.tsv").c_str()) == MEMECLF_OK);
        CHECK(memeclf_run("evaluate", cfg, tmp.str("o").c_str()) == MEMECLF_E_ALIGNMENT);
    }
}

} // TEST_SUITE
