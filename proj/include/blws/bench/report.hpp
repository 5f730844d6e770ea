#ifndef BLWS_BENCH_REPORT_HPP
#define BLWS_BENCH_REPORT_HPP

#include <cstdint>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "blws/core/types.hpp"

namespace blws::bench {

enum class ProblemKind { Rpca, Mc };

/// One completed scenario. RPCA rows carry (method, rel_err, rank_hat, e_l0,
/// iters, time_s); MC rows carry (r, s_dr, s_m2, algorithm, time_s, iters,
/// rel_err); both carry the operator application count.
struct ReportRow {
    ProblemKind problem = ProblemKind::Rpca;
    Index m = 0;
    std::string method;  ///< e.g. "ADM", "BLWS-ADM", "SVT", "BLWS-SVT"
    double rel_err = -1;
    Index rank_hat = 0;
    std::int64_t e_l0 = 0;
    Index iters = 0;
    double time_s = 0;
    std::int64_t matvecs = 0;
    Index r = 0;       ///< MC only
    double s_dr = 0;   ///< MC only
    double s_m2 = 0;   ///< MC only
    bool converged = true;
};

enum class ReportFormat { Csv, Markdown };

namespace report_detail {

inline std::string sci3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2e", v);
    return buf;
}

inline std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string general(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

/// RFC 4180: quote when the field contains a comma, quote, or newline.
inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::vector<std::string> row_cells(const ReportRow& row, bool with_flag) {
    std::vector<std::string> cells;
    if (row.problem == ProblemKind::Rpca) {
        cells = {std::to_string(row.m),     row.method,
                 sci3(row.rel_err),         std::to_string(row.rank_hat),
                 std::to_string(row.e_l0),  std::to_string(row.iters),
                 fixed2(row.time_s),        std::to_string(row.matvecs)};
    } else {
        cells = {std::to_string(row.m),  std::to_string(row.r), general(row.s_dr),
                 general(row.s_m2),      row.method,            fixed2(row.time_s),
                 std::to_string(row.iters), sci3(row.rel_err),  std::to_string(row.matvecs)};
    }
    if (with_flag) cells.push_back(row.converged ? "" : "nonconverged");
    return cells;
}

inline std::vector<std::string> header_cells(ProblemKind kind, bool with_flag) {
    std::vector<std::string> cells;
    if (kind == ProblemKind::Rpca)
        cells = {"m", "method", "rel_err", "rank_hat", "e_l0", "iters", "time_s", "matvecs"};
    else
        cells = {"m", "r", "s_dr", "s_m2", "algorithm", "time_s", "iters", "rel_err", "matvecs"};
    if (with_flag) cells.push_back("flag");
    return cells;
}

/// "speedup=<baseline_time/blws_time>" when the batch is exactly one
/// baseline/warm-started pair of the same scenario.
inline std::string speedup_line(const std::vector<ReportRow>& rows) {
    if (rows.size() != 2) return {};
    const ReportRow& a = rows[0];
    const ReportRow& b = rows[1];
    if (a.problem != b.problem || a.m != b.m || a.r != b.r) return {};
    const bool a_blws = a.method.find("BLWS") != std::string::npos;
    const bool b_blws = b.method.find("BLWS") != std::string::npos;
    if (a_blws == b_blws) return {};
    const ReportRow& base = a_blws ? b : a;
    const ReportRow& warm = a_blws ? a : b;
    if (warm.time_s <= 0) return {};
    return "speedup=" + fixed2(base.time_s / warm.time_s);
}

}  // namespace report_detail

/// Renders rows of one problem kind as CSV (RFC 4180) or a pipe table.
/// A trailing "flag" column appears only if some row did not converge.
/// Byte-stable for identical inputs.
inline std::string emit_table(const std::vector<ReportRow>& rows, ReportFormat format) {
    using namespace report_detail;
    if (rows.empty()) throw std::invalid_argument("emit_table: no rows");
    const ProblemKind kind = rows.front().problem;
    bool with_flag = false;
    for (const auto& row : rows) {
        if (row.problem != kind) throw std::invalid_argument("emit_table: mixed row schemas");
        if (!row.converged) with_flag = true;
    }

    std::ostringstream out;
    const auto header = header_cells(kind, with_flag);
    if (format == ReportFormat::Csv) {
        for (std::size_t i = 0; i < header.size(); ++i)
            out << (i ? "," : "") << csv_escape(header[i]);
        out << "\n";
        for (const auto& row : rows) {
            const auto cells = row_cells(row, with_flag);
            for (std::size_t i = 0; i < cells.size(); ++i)
                out << (i ? "," : "") << csv_escape(cells[i]);
            out << "\n";
        }
    } else {
        auto emit_md_row = [&out](const std::vector<std::string>& cells) {
            out << "|";
            for (const auto& c : cells) out << " " << c << " |";
            out << "\n";
        };
        emit_md_row(header);
        out << "|";
        for (std::size_t i = 0; i < header.size(); ++i) out << " --- |";
        out << "\n";
        for (const auto& row : rows) emit_md_row(row_cells(row, with_flag));
    }
    const std::string speedup = speedup_line(rows);
    if (!speedup.empty()) out << speedup << "\n";
    return out.str();
}

}  // namespace blws::bench

#endif
