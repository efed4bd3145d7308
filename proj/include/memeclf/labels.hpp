#ifndef MEMECLF_LABELS_HPP
#define MEMECLF_LABELS_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "memeclf/errors.hpp"

namespace memeclf {

// Canonical task order. This order is fixed everywhere: corpus columns,
// prediction files, head layouts.
enum class Task : int {
    misogynous = 0,
    shaming = 1,
    stereotype = 2,
    objectification = 3,
    violence = 4,
};

inline constexpr int kNumTasks = 5;

inline const std::array<std::string, kNumTasks>& task_names() {
    static const std::array<std::string, kNumTasks> names = {
        "misogynous", "shaming", "stereotype", "objectification", "violence"};
    return names;
}

inline const std::string& task_name(Task t) { return task_names()[static_cast<int>(t)]; }

inline std::vector<Task> all_tasks() {
    return {Task::misogynous, Task::shaming, Task::stereotype, Task::objectification,
            Task::violence};
}

// The five binary targets. The four subcategories imply misogynous.
struct LabelVector {
    std::array<uint8_t, kNumTasks> bits{0, 0, 0, 0, 0};

    uint8_t& operator[](Task t) { return bits[static_cast<int>(t)]; }
    uint8_t operator[](Task t) const { return bits[static_cast<int>(t)]; }

    bool all_zero() const {
        for (uint8_t b : bits)
            if (b) return false;
        return true;
    }

    bool operator==(const LabelVector&) const = default;

    static LabelVector of(uint8_t mis, uint8_t sha, uint8_t ste, uint8_t obj, uint8_t vio) {
        LabelVector v;
        v.bits = {mis, sha, ste, obj, vio};
        return v;
    }
};

// Hierarchy rule: any positive subcategory requires misogynous = 1.
inline bool validate_hierarchy(const LabelVector& labels) {
    bool any_sub = labels.bits[1] || labels.bits[2] || labels.bits[3] || labels.bits[4];
    return !any_sub || labels.bits[0] == 1;
}

} // namespace memeclf

#endif
