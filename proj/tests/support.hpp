#pragma once

#include "disae/data/dataset.hpp"
#include "disae/random.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

namespace testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("disae-test-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
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

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

// Two-task, one-domain toy: task 0 depends on feature 0, task 1 on feature 1,
// instance 1 shifts feature 2.
inline disae::data::Dataset toy_dataset(disae::Index n, std::uint64_t seed, int n_instances = 2) {
    using namespace disae;
    Rng rng(seed);
    Matrix x(n, 4);
    std::vector<int> t0, t1;
    data::DomainColumn dom;
    for (Index i = 0; i < n; ++i) {
        const int inst = static_cast<int>(i % n_instances);
        for (int j = 0; j < 4; ++j) x(i, j) = rng.normal();
        x(i, 2) += 3.0 * inst;
        t0.push_back(x(i, 0) > 0 ? 1 : 0);
        t1.push_back(x(i, 1) > 0.3 ? 1 : 0);
        dom.ids.push_back(inst);
    }
    data::DomainSpec spec;
    spec.name = "instance";
    spec.n_instances = n_instances;
    return data::Dataset(x, {"a", "b", "c", "d"}, {{"t0", 2, {}}, {"t1", 2, {}}}, {t0, t1}, {spec}, {dom});
}

}  // namespace testing
