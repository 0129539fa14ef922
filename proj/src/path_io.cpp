#include "jmlab/path_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace jmlab {

std::string g17(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    return buf;
}

void write_path_csv(const SampledPath& path, std::ostream& os) {
    path.validate();
    os << "param";
    for (std::size_t k = 0; k < path.dim(); ++k) os << ",q" << k;
    os << "\n";
    for (std::size_t i = 0; i < path.size(); ++i) {
        os << g17(path.params[i]);
        for (double x : path.points[i]) os << ',' << g17(x);
        os << "\n";
    }
}

std::string path_csv(const SampledPath& path) {
    std::ostringstream ss;
    write_path_csv(path, ss);
    return ss.str();
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace

SampledPath read_path_csv(std::istream& is, ParamKind kind) {
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("path csv: empty input");
    std::vector<std::string> header = split_csv_line(line);
    if (header.empty() || header[0] != "param")
        throw std::invalid_argument("path csv: header must start with 'param'");
    std::size_t dim = header.size() - 1;
    if (dim == 0) throw std::invalid_argument("path csv: no coordinate columns");
    for (std::size_t k = 0; k < dim; ++k)
        if (header[k + 1] != "q" + std::to_string(k))
            throw std::invalid_argument("path csv: coordinate columns must be q0,q1,...");

    std::vector<Vec> points;
    std::vector<double> params;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != dim + 1)
            throw std::invalid_argument("path csv: wrong column count on line " +
                                        std::to_string(lineno));
        Vec q(dim);
        char* end = nullptr;
        for (std::size_t k = 0; k <= dim; ++k) {
            double v = std::strtod(cells[k].c_str(), &end);
            if (end == cells[k].c_str() || *end != '\0')
                throw std::invalid_argument("path csv: bad number on line " +
                                            std::to_string(lineno));
            if (k == 0)
                params.push_back(v);
            else
                q[k - 1] = v;
        }
        points.push_back(std::move(q));
    }
    return SampledPath(std::move(points), std::move(params), kind);
}

std::string path_summary_json(const SampledPath& path, const JmMetric& metric) {
    path.validate();
    nlohmann::json j;
    j["samples"] = path.size();
    j["dim"] = path.dim();
    switch (path.kind) {
        case ParamKind::Time: j["kind"] = "time"; break;
        case ParamKind::Arclength: j["kind"] = "arclength"; break;
        case ParamKind::Abstract: j["kind"] = "abstract"; break;
    }
    j["h0"] = metric.h0;
    j["jm_length"] = jm_length(metric, path);
    return j.dump(2) + "\n";
}

void write_file_atomic(const std::filesystem::path& target, const std::string& content) {
    std::filesystem::path dir = target.parent_path();
    if (!dir.empty()) std::filesystem::create_directories(dir);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        os << content;
        os.flush();
        if (!os.good()) throw std::runtime_error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
}

} // namespace jmlab
