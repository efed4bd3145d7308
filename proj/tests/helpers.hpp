#ifndef MEMECLF_TESTS_HELPERS_HPP
#define MEMECLF_TESTS_HELPERS_HPP

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

#include "memeclf/dataset.hpp"
#include "memeclf/rng.hpp"
#include "memeclf/synth.hpp"

namespace testutil {

// Unique scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        auto base = std::filesystem::temp_directory_path();
        memeclf::RngStream rng(memeclf::fnv1a64(tag) ^
                               static_cast<uint64_t>(
                                   std::chrono::steady_clock::now().time_since_epoch().count()));
        for (int attempt = 0; attempt < 64; ++attempt) {
            auto candidate = base / ("memeclf_test_" + tag + "_" +
                                     std::to_string(rng.next_u64() & 0xffffffu));
            std::error_code ec;
            if (std::filesystem::create_directory(candidate, ec)) {
                path_ = candidate;
                return;
            }
        }
        throw std::runtime_error("could not create temp directory for tag " + tag);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string str(const std::string& rel = "") const {
        return rel.empty() ? path_.string() : (path_ / rel).string();
    }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << text;
}

// Labeled in-memory dataset with calibrated labels and trivial text; no
// images on disk (image_ref left empty), for code paths that never decode.
inline memeclf::Dataset make_labeled_dataset(int n, uint64_t seed) {
    auto labels = memeclf::synth_labels(n, seed);
    memeclf::Dataset ds;
    for (int i = 0; i < n; ++i) {
        memeclf::MemeSample s;
        s.id = "row_" + std::to_string(1000 + i) + ".png";
        s.text = "word" + std::to_string(i % 7);
        s.labels = labels[static_cast<size_t>(i)];
        ds.samples.push_back(std::move(s));
    }
    return ds;
}

} // namespace testutil

#endif
