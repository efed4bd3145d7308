#ifndef MEMECLF_TENSOR_STORE_HPP
#define MEMECLF_TENSOR_STORE_HPP

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

namespace memeclf {

// Versioned on-disk container for named float64 tensors: a directory holding
// `checkpoint.json` (index + free-form meta) and `tensors.bin` (row-major
// little-endian doubles, concatenated in index order). Used for both encoder
// checkpoints and trained model weights.
class TensorStore {
public:
    static constexpr int kFormatVersion = 1;

    void put(const std::string& name, const Eigen::MatrixXd& tensor);
    const Eigen::MatrixXd& get(const std::string& name) const;
    bool has(const std::string& name) const { return tensors_.count(name) != 0; }
    std::vector<std::string> names() const;
    size_t size() const { return tensors_.size(); }

    nlohmann::json& meta() { return meta_; }
    const nlohmann::json& meta() const { return meta_; }

    void save(const std::filesystem::path& dir) const;
    static TensorStore load(const std::filesystem::path& dir);

private:
    std::map<std::string, Eigen::MatrixXd> tensors_;
    nlohmann::json meta_ = nlohmann::json::object();
};

} // namespace memeclf

#endif
