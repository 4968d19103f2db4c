#include "critmin/field.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <system_error>

namespace critmin {

RadialGrid::RadialGrid(std::vector<double> nodes, double grading)
    : nodes_(std::move(nodes)), grading_(grading) {
    if (nodes_.size() < 2) throw std::invalid_argument("RadialGrid: need at least two nodes");
    if (nodes_.front() != 0.0) throw std::invalid_argument("RadialGrid: first node must be 0");
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
        if (!(nodes_[i] > nodes_[i - 1])) {
            throw std::invalid_argument("RadialGrid: nodes must be strictly increasing");
        }
    }
    if (!std::isfinite(nodes_.back())) throw std::invalid_argument("RadialGrid: non-finite node");
}

RadialGrid RadialGrid::graded(double R, int M, double gamma) {
    if (M < 8) throw std::invalid_argument("RadialGrid: M must be >= 8");
    if (!(gamma >= 1.0)) throw std::invalid_argument("RadialGrid: gamma must be >= 1");
    if (!(R > 0.0)) throw std::invalid_argument("RadialGrid: R must be > 0");
    std::vector<double> nodes(M + 1);
    for (int i = 0; i <= M; ++i) {
        nodes[i] = R * std::pow(static_cast<double>(i) / M, gamma);
    }
    nodes[M] = R;  // exact endpoint
    return RadialGrid(std::move(nodes), gamma);
}

GridPtr make_grid(const ProblemParams& params, int M, double gamma) {
    params.validate();
    return std::make_shared<const RadialGrid>(RadialGrid::graded(params.R, M, gamma));
}

RadialField::RadialField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw std::invalid_argument("RadialField: null grid");
    if (values_.size() != grid_->node_count()) {
        throw std::invalid_argument("RadialField: value count does not match grid");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw std::invalid_argument("RadialField: non-finite value");
    }
    if (values_.back() != 0.0) {
        throw std::invalid_argument("RadialField: boundary value must be 0");
    }
}

RadialField::RadialField(GridPtr grid, std::vector<double> values, unchecked_tag)
    : grid_(std::move(grid)), values_(std::move(values)) {}

RadialField RadialField::sample(GridPtr grid, const std::function<double(double)>& fn) {
    std::vector<double> values(grid->node_count());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = fn(grid->node(i));
    return RadialField(std::move(grid), std::move(values));
}

RadialField RadialField::zero(GridPtr grid) {
    std::vector<double> values(grid->node_count(), 0.0);
    return RadialField(std::move(grid), std::move(values));
}

RadialField RadialField::unchecked(GridPtr grid, std::vector<double> values) {
    if (!grid || values.size() != grid->node_count()) {
        throw std::invalid_argument("RadialField: value count does not match grid");
    }
    return RadialField(std::move(grid), std::move(values), unchecked_tag{});
}

std::string format_shortest(double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

void write_field(std::ostream& out, const RadialField& field, const ProblemParams& params) {
    out << "# n=" << params.n << " beta=" << format_shortest(params.beta)
        << " k=" << format_shortest(params.k) << " R=" << format_shortest(params.R) << "\n";
    for (std::size_t i = 0; i < field.node_count(); ++i) {
        out << format_shortest(field.grid().node(i)) << " " << format_shortest(field.value(i))
            << "\n";
    }
}

namespace {

double parse_double(std::string_view token, const char* what) {
    double value = 0.0;
    auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
        throw std::invalid_argument(std::string("field parse: bad ") + what + " '" +
                                    std::string(token) + "'");
    }
    return value;
}

std::string_view header_value(const std::string& header, const std::string& key) {
    const auto pos = header.find(key + "=");
    if (pos == std::string::npos) {
        throw std::invalid_argument("field parse: header missing key " + key);
    }
    const auto start = pos + key.size() + 1;
    auto end = header.find(' ', start);
    if (end == std::string::npos) end = header.size();
    return std::string_view(header).substr(start, end - start);
}

}  // namespace

std::pair<RadialField, ProblemParams> read_field(std::istream& in) {
    std::string header;
    if (!std::getline(in, header) || header.empty() || header[0] != '#') {
        throw std::invalid_argument("field parse: missing header line");
    }
    ProblemParams params;
    params.n = static_cast<int>(parse_double(header_value(header, "n"), "n"));
    params.beta = parse_double(header_value(header, "beta"), "beta");
    params.k = parse_double(header_value(header, "k"), "k");
    params.R = parse_double(header_value(header, "R"), "R");
    params.validate();

    std::vector<double> radii, values;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string a, b;
        if (!(ls >> a >> b)) throw std::invalid_argument("field parse: bad data line: " + line);
        radii.push_back(parse_double(a, "radius"));
        values.push_back(parse_double(b, "value"));
    }
    auto grid = std::make_shared<const RadialGrid>(std::move(radii));
    return {RadialField(grid, std::move(values)), params};
}

void write_field_file(const std::string& path, const RadialField& field,
                      const ProblemParams& params) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    write_field(out, field, params);
}

std::pair<RadialField, ProblemParams> read_field_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    return read_field(in);
}

}  // namespace critmin
