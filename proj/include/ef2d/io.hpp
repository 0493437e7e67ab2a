#pragma once

// Artifact serialization: the EF2D binary matrix container, CSV writers for
// matrices / meshes / spectrum reports / kernel traces, and the JSON form of
// a SpectrumReport (via nlohmann::json).

#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ef2d/assembly.hpp"
#include "ef2d/curve.hpp"
#include "ef2d/spectral.hpp"

namespace ef2d::io {

inline constexpr std::uint32_t kBinaryVersion = 1;

class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Binary container: magic "EF2D", version u32, N u32, then N*N complex
// entries as interleaved little-endian f64, row-major.
inline void write_matrix_binary(std::ostream& out, const Eigen::MatrixXcd& m) {
    if (m.rows() != m.cols()) throw IoError("write_matrix_binary: matrix not square");
    out.write("EF2D", 4);
    const std::uint32_t version = kBinaryVersion;
    const std::uint32_t n = static_cast<std::uint32_t>(m.rows());
    out.write(reinterpret_cast<const char*>(&version), 4);
    out.write(reinterpret_cast<const char*>(&n), 4);
    std::vector<double> row(2 * n);
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = 0; j < n; ++j) {
            row[2 * j] = m(i, j).real();
            row[2 * j + 1] = m(i, j).imag();
        }
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size() * sizeof(double)));
    }
    if (!out) throw IoError("write_matrix_binary: stream failure");
}

inline Eigen::MatrixXcd read_matrix_binary(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "EF2D", 4) != 0)
        throw IoError("read_matrix_binary: bad magic");
    std::uint32_t version = 0, n = 0;
    in.read(reinterpret_cast<char*>(&version), 4);
    in.read(reinterpret_cast<char*>(&n), 4);
    if (!in || version != kBinaryVersion)
        throw IoError("read_matrix_binary: unsupported version");
    Eigen::MatrixXcd m(n, n);
    std::vector<double> row(2 * n);
    for (std::uint32_t i = 0; i < n; ++i) {
        in.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(row.size() * sizeof(double)));
        if (!in) throw IoError("read_matrix_binary: truncated payload");
        for (std::uint32_t j = 0; j < n; ++j) m(i, j) = {row[2 * j], row[2 * j + 1]};
    }
    return m;
}

inline void write_matrix_binary_file(const std::string& path, const Eigen::MatrixXcd& m) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path);
    write_matrix_binary(f, m);
}

inline Eigen::MatrixXcd read_matrix_binary_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for reading: " + path);
    return read_matrix_binary(f);
}

namespace detail {
// Shortest round-trip double formatting, stable across runs and thread counts.
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
}  // namespace detail

// `header` lines (if any) are emitted first, each prefixed with "# ".
inline void write_csv_header(std::ostream& out, const std::vector<std::string>& header) {
    for (const auto& line : header) out << "# " << line << "\n";
}

inline void write_matrix_csv(std::ostream& out, const Eigen::MatrixXcd& m,
                             const std::vector<std::string>& header = {}) {
    if (m.rows() > 256 || m.cols() > 256)
        throw IoError("write_matrix_csv: CSV export limited to N <= 256");
    write_csv_header(out, header);
    out << "row,col,re,im\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            out << i << "," << j << "," << detail::fmt(m(i, j).real()) << ","
                << detail::fmt(m(i, j).imag()) << "\n";
    if (!out) throw IoError("write_matrix_csv: stream failure");
}

inline void write_mesh_csv(std::ostream& out, const CurveMesh& mesh,
                           const std::vector<std::string>& header = {}) {
    write_csv_header(out, header);
    out << "node,x,y\n";
    for (std::size_t i = 0; i < mesh.size(); ++i)
        out << i << "," << detail::fmt(mesh.nodes[i].x) << ","
            << detail::fmt(mesh.nodes[i].y) << "\n";
    if (!out) throw IoError("write_mesh_csv: stream failure");
}

inline void write_spectrum_csv(std::ostream& out, const SpectrumReport& report,
                               const std::vector<std::string>& header = {}) {
    write_csv_header(out, header);
    out << "n,mu_n,sqrt_mu_n,sigma_n,operator,kernel_family,k,alpha\n";
    for (const auto& row : report.rows)
        out << row.n << "," << detail::fmt(row.mu) << "," << detail::fmt(row.sqrt_mu)
            << "," << detail::fmt(row.sigma) << "," << report.op_label << ","
            << report.kernel_family << "," << detail::fmt(report.k) << ","
            << detail::fmt(report.alpha) << "\n";
    if (!out) throw IoError("write_spectrum_csv: stream failure");
}

inline nlohmann::json spectrum_to_json(const SpectrumReport& report,
                                       const nlohmann::json& metadata = {}) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : report.rows)
        rows.push_back({{"n", row.n},
                        {"mu_n", row.mu},
                        {"sqrt_mu_n", row.sqrt_mu},
                        {"sigma_n", row.sigma}});
    nlohmann::json j = {{"operator", report.op_label},
                        {"kernel_family", report.kernel_family},
                        {"k", report.k},
                        {"alpha", report.alpha},
                        {"rows", rows}};
    if (!metadata.is_null()) j["metadata"] = metadata;
    return j;
}

// Kernel trace: (r, Re g, Im g) triples over a caller-supplied radius grid.
inline void write_kernel_trace_csv(std::ostream& out, const KernelSpec& spec,
                                   const std::vector<double>& radii,
                                   const std::vector<std::string>& header = {}) {
    write_csv_header(out, header);
    out << "r,re_g,im_g\n";
    for (double r : radii) {
        const std::complex<double> g = kernel_value(spec, r);
        out << detail::fmt(r) << "," << detail::fmt(g.real()) << ","
            << detail::fmt(g.imag()) << "\n";
    }
    if (!out) throw IoError("write_kernel_trace_csv: stream failure");
}

}  // namespace ef2d::io
