#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace homog {

using Vec = std::vector<double>;

// Dense row-major square matrix. Kernel families on desk-scale spaces are
// small enough that anything fancier costs more than it saves.
struct Matrix {
    int n = 0;
    std::vector<double> a;

    Matrix() = default;
    explicit Matrix(int n_) : n(n_), a(static_cast<size_t>(n_) * n_, 0.0) {}

    double& at(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
    double at(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }
};

struct ValidationIssue {
    std::string what;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }
    void add(std::string w) { issues.push_back({std::move(w)}); }
    std::string joined() const {
        std::string s;
        for (const auto& i : issues) {
            s += i.what;
            s += '\n';
        }
        return s;
    }
};

} // namespace homog
