#include "mma/json_io.hpp"

#include "mma/matrix_io.hpp"

#include <fstream>

namespace mma {

Json stats_to_json(const StatCounters& s) {
    Json instr = Json::object();
    for (const auto& [mnemonic, count] : s.instructions) instr[mnemonic] = count;
    return Json{{"instructions", instr},
                {"total_instructions", s.total_instructions()},
                {"ger_instructions", s.ger_count},
                {"flops", s.flops},
                {"int_ops", s.int_ops}};
}

Json machine_to_json(const MachineState& m) {
    Json vsrs = Json::array();
    for (int i = 0; i < 64; i++) vsrs.push_back(to_hex(m.peek_vsr(i)));
    Json accs = Json::array();
    for (int i = 0; i < 8; i++) {
        const Accumulator& a = m.acc(i);
        Json rows = Json::array();
        for (int r = 0; r < 4; r++) rows.push_back(to_hex(a.rows[r]));
        accs.push_back(Json{{"rows", rows}, {"state", acc_state_name(a.state)}});
    }
    return Json{{"vsr", vsrs}, {"acc", accs}, {"stats", stats_to_json(m.stats())}};
}

Json accview_to_json(const AccView& v) {
    Json rows = Json::array();
    for (int r = 0; r < 4; r++) {
        Json row = Json::array();
        for (int c = 0; c < v.cols(); c++) {
            if (v.layout == AccLayout::Int32_4x4)
                row.push_back((int64_t)v.v[r][c]);
            else
                row.push_back(v.v[r][c]);
        }
        rows.push_back(row);
    }
    return Json{{"layout", acc_layout_name(v.layout)}, {"values", rows}};
}

Json report_to_json(const RunReport& r) {
    Json out{{"pass", r.pass}};
    Json failures = Json::array();
    for (const ExpectFailure& f : r.failures)
        failures.push_back(Json{{"line", f.line},
                                {"acc", f.acc},
                                {"row", f.row},
                                {"col", f.col},
                                {"got", f.got},
                                {"want", f.want},
                                {"tol", f.tol}});
    out["failures"] = failures;
    Json dumps = Json::array();
    for (const DumpRecord& d : r.dumps) {
        Json entry = accview_to_json(d.view);
        entry["line"] = d.line;
        entry["acc"] = d.acc;
        dumps.push_back(entry);
    }
    out["dumps"] = dumps;
    if (r.abort)
        out["abort"] = Json{{"line", r.abort->line},
                            {"error", err_name(r.abort->code)},
                            {"message", r.abort->message}};
    out["stats"] = stats_to_json(r.stats);
    return out;
}

Json lint_to_json(const std::vector<LintDiag>& diags) {
    Json out = Json::array();
    for (const LintDiag& d : diags) {
        Json entry{{"line", d.line},
                   {"severity", d.severity == LintSeverity::Error ? "error" : "warning"},
                   {"message", d.message}};
        if (d.severity == LintSeverity::Error) entry["code"] = err_name(d.code);
        out.push_back(entry);
    }
    return out;
}

namespace {

template <typename T>
Json matrix_json(const Matrix<T>& m) {
    Json rows = Json::array();
    for (int r = 0; r < m.rows; r++) {
        Json row = Json::array();
        for (int c = 0; c < m.cols; c++) row.push_back(m.at(r, c));
        rows.push_back(row);
    }
    return rows;
}

template <typename T>
Matrix<T> matrix_from(const Json& j, const char* what) {
    if (!j.is_array() || j.empty() || !j[0].is_array())
        throw MmaError(ErrCode::IoError, std::string(what) + ": matrix literal must be an array of rows");
    Matrix<T> m((int)j.size(), (int)j[0].size());
    for (int r = 0; r < m.rows; r++) {
        if (!j[r].is_array() || (int)j[r].size() != m.cols)
            throw MmaError(ErrCode::IoError, std::string(what) + ": ragged matrix literal");
        for (int c = 0; c < m.cols; c++) {
            if (!j[r][c].is_number())
                throw MmaError(ErrCode::IoError, std::string(what) + ": non-numeric matrix entry");
            m.at(r, c) = (T)j[r][c].get<double>();
        }
    }
    return m;
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MmaError(ErrCode::IoError, "cannot open \"" + path + "\"");
    Json j = Json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw MmaError(ErrCode::IoError, "\"" + path + "\" is not valid JSON");
    return j;
}

bool ends_with(const std::string& s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

} // namespace

Json matrix_to_json(const MatrixF64& m) { return matrix_json(m); }
Json matrix_to_json(const MatrixF32& m) { return matrix_json(m); }
MatrixF64 matrix_f64_from_json(const Json& j) { return matrix_from<double>(j, "matrix"); }
MatrixF32 matrix_f32_from_json(const Json& j) { return matrix_from<float>(j, "matrix"); }

MatrixF64 load_matrix_f64(const std::string& path) {
    if (ends_with(path, ".mmat")) return read_mmat_f64(path);
    return matrix_f64_from_json(read_json_file(path));
}

MatrixF32 load_matrix_f32(const std::string& path) {
    if (ends_with(path, ".mmat")) return read_mmat_f32(path);
    return matrix_f32_from_json(read_json_file(path));
}

ConvProblem load_conv_problem(const std::string& path) {
    Json j = read_json_file(path);
    if (!j.is_object())
        throw MmaError(ErrCode::IoError, "problem file must hold a JSON object");
    ConvProblem p;
    auto plane = [&](const char* key) -> MatrixF32 {
        if (!j.contains(key))
            throw MmaError(ErrCode::IoError, "problem file is missing \"" + std::string(key) + "\"");
        if (j[key].is_string()) return load_matrix_f32(j[key].get<std::string>());
        return matrix_from<float>(j[key], key);
    };
    p.h = plane("h");
    p.r = plane("r");
    p.g = plane("g");
    p.b = plane("b");
    p.row = j.value("row", 0);
    p.n = j.value("n", p.r.cols);
    return p;
}

} // namespace mma
