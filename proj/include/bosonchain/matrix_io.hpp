#pragma once

#include <Eigen/Dense>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "bosonchain/gaussian.hpp"

namespace bosonchain {

// Text matrix format: one header line "rows cols time", then `rows` lines of
// `cols` values at full double precision, row-major.  Writes go through a
// temporary file and an atomic rename so readers never see partial content.

inline void save_state(const std::string& path, const CovarianceState& state) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out)
            throw std::runtime_error("save_state: cannot open " + tmp);
        out.precision(17);
        out << state.gamma.rows() << ' ' << state.gamma.cols() << ' ' << state.time << '\n';
        for (Eigen::Index i = 0; i < state.gamma.rows(); ++i) {
            for (Eigen::Index j = 0; j < state.gamma.cols(); ++j)
                out << state.gamma(i, j) << (j + 1 < state.gamma.cols() ? " " : "");
            out << '\n';
        }
        if (!out)
            throw std::runtime_error("save_state: write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

inline CovarianceState load_state(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("load_state: cannot open " + path);
    Eigen::Index rows = 0, cols = 0;
    double time = 0.0;
    std::string header;
    if (!std::getline(in, header))
        throw std::runtime_error("load_state: missing header in " + path);
    {
        std::istringstream hs(header);
        if (!(hs >> rows >> cols >> time) || rows < 1 || cols < 1)
            throw std::runtime_error("load_state: malformed header in " + path);
    }
    CovarianceState state;
    state.time = time;
    state.gamma.resize(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            if (!(in >> state.gamma(i, j)))
                throw std::runtime_error("load_state: truncated matrix body in " + path);
    return state;
}

}  // namespace bosonchain
