#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fieldnorm/corpus.hpp"

namespace fieldnorm::testing {

inline const std::filesystem::path kFixtures = FIELDNORM_FIXTURES;

inline PaperRecord paper(std::string id, int year, std::string journal = "J",
                         std::optional<std::int64_t> refs = std::nullopt) {
    return {std::move(id), year, std::move(journal), refs};
}

inline FieldAssignment assign(std::string id, std::string field, std::string scheme = "s",
                              std::string level = "l") {
    return {std::move(id), std::move(scheme), std::move(level), std::move(field)};
}

inline const Grouping kSL{"s", "l"};

inline Corpus make_corpus(std::vector<PaperRecord> papers, std::vector<CitationEdge> edges,
                          const std::vector<FieldAssignment>& fields = {}) {
    return Corpus::build(std::move(papers), std::move(edges), fields, WindowConfig{});
}

// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("fieldnorm_test_" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

    std::filesystem::path write(const std::string& name, const std::string& text) const {
        const auto p = path_ / name;
        std::ofstream(p, std::ios::binary) << text;
        return p;
    }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace fieldnorm::testing
