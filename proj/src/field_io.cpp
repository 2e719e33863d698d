#include "spdelab/field_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace spdelab {

namespace {

using nlohmann::json;

void write_values(std::ostream& os, const std::vector<cplx>& values, bool complex_values) {
    os.precision(17);
    std::size_t col = 0;
    for (const cplx& z : values) {
        if (complex_values) {
            os << z.real() << ' ' << z.imag();
        } else {
            if (z.imag() != 0.0)
                throw std::invalid_argument("write_field: dtype f64 requires real values");
            os << z.real();
        }
        os << (++col % 4 == 0 ? '\n' : ' ');
    }
    if (col % 4 != 0) os << '\n';
}

struct Header {
    Grid grid;
    int arity = 1;
    bool complex_values = true;
};

Header read_header(std::istream& is, const std::string& path) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("field file: empty file " + path);
    json h = json::parse(line);
    Header out;
    out.grid = Grid(h.at("d").get<int>(), h.at("n").get<int>(), h.at("L").get<double>());
    out.arity = h.at("arity").get<int>();
    const std::string dtype = h.at("dtype").get<std::string>();
    if (dtype == "c128") out.complex_values = true;
    else if (dtype == "f64") out.complex_values = false;
    else throw std::runtime_error("field file: unknown dtype '" + dtype + "' in " + path);
    return out;
}

void read_values(std::istream& is, std::vector<cplx>& values, bool complex_values,
                 const std::string& path) {
    for (cplx& z : values) {
        double re = 0.0, im = 0.0;
        if (!(is >> re)) throw std::runtime_error("field file: truncated values in " + path);
        if (complex_values && !(is >> im))
            throw std::runtime_error("field file: truncated values in " + path);
        z = cplx{re, im};
    }
    double extra;
    if (is >> extra) throw std::runtime_error("field file: trailing values in " + path);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    return os;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open for reading: " + path);
    return is;
}

void write_header(std::ostream& os, const Grid& g, int arity, bool complex_values) {
    json h;
    h["d"] = g.d;
    h["n"] = g.n;
    h["L"] = g.L;
    h["arity"] = arity;
    h["dtype"] = complex_values ? "c128" : "f64";
    os << h.dump() << '\n';
}

json sym_to_json(const SymMat& a, int d) {
    json rows = json::array();
    for (int i = 0; i < d; ++i) {
        json row = json::array();
        for (int j = 0; j < d; ++j) row.push_back(a(i, j));
        rows.push_back(row);
    }
    return rows;
}

SymMat sym_from_json(const json& rows, int d) {
    SymMat a(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = rows.at(i).at(j).get<double>();
    return a;
}

}  // namespace

void write_field(const std::string& path, const GridField& field, bool complex_values) {
    std::ofstream os = open_out(path);
    write_header(os, field.grid, field.arity, complex_values);
    write_values(os, field.values, complex_values);
    if (!os) throw std::runtime_error("write failed: " + path);
}

void write_spectrum(const std::string& path, const Spectrum& spec) {
    std::ofstream os = open_out(path);
    write_header(os, spec.grid, spec.arity, true);
    write_values(os, spec.coeffs, true);
    if (!os) throw std::runtime_error("write failed: " + path);
}

GridField read_field(const std::string& path) {
    std::ifstream is = open_in(path);
    const Header h = read_header(is, path);
    GridField out(h.grid, h.arity);
    read_values(is, out.values, h.complex_values, path);
    return out;
}

Spectrum read_spectrum(const std::string& path) {
    std::ifstream is = open_in(path);
    const Header h = read_header(is, path);
    if (!h.complex_values)
        throw std::runtime_error("field file: spectra must use dtype c128: " + path);
    Spectrum out(h.grid, h.arity);
    read_values(is, out.coeffs, true, path);
    return out;
}

void write_coefficients(const std::string& path, const CoefficientPath& coeffs) {
    json doc;
    doc["family"] = coeffs.family;
    doc["seed"] = coeffs.seed;
    doc["d"] = coeffs.d;
    doc["K"] = coeffs.K;
    doc["times"] = coeffs.times;
    json as = json::array();
    for (const SymMat& a : coeffs.a) as.push_back(sym_to_json(a, coeffs.d));
    doc["a"] = as;
    doc["sigma"] = coeffs.sigma;
    std::ofstream os = open_out(path);
    os.precision(17);
    os << doc.dump(2) << '\n';
    if (!os) throw std::runtime_error("write failed: " + path);
}

CoefficientPath read_coefficients(const std::string& path) {
    std::ifstream is = open_in(path);
    json doc = json::parse(is);
    CoefficientPath out;
    out.family = doc.at("family").get<std::string>();
    out.seed = doc.at("seed").get<std::uint64_t>();
    out.d = doc.at("d").get<int>();
    out.K = doc.at("K").get<int>();
    out.times = doc.at("times").get<std::vector<double>>();
    for (const json& rows : doc.at("a")) out.a.push_back(sym_from_json(rows, out.d));
    out.sigma = doc.at("sigma").get<std::vector<std::vector<double>>>();
    if (out.a.size() + 1 != out.times.size() || out.sigma.size() != out.a.size())
        throw std::runtime_error("coefficient file: inconsistent sizes in " + path);
    return out;
}

void write_trajectory(const std::string& dir, const std::string& stem, const Trajectory& traj,
                      const CoefficientPath& coeffs) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const std::string coeff_file = stem + "_coefficients.json";
    write_coefficients((fs::path(dir) / coeff_file).string(), coeffs);

    json manifest;
    manifest["times"] = traj.times;
    manifest["coeff_seed"] = traj.coeff_seed;
    manifest["wiener_seed"] = traj.wiener_seed;
    manifest["path_index"] = traj.path_index;
    manifest["coefficients"] = coeff_file;
    json states = json::array();
    for (std::size_t m = 0; m < traj.states.size(); ++m) {
        std::ostringstream name;
        name << stem << "_state_" << m << ".field";
        write_spectrum((fs::path(dir) / name.str()).string(), traj.states[m]);
        states.push_back(name.str());
    }
    manifest["states"] = states;
    std::ofstream os = open_out((fs::path(dir) / (stem + "_manifest.json")).string());
    os << manifest.dump(2) << '\n';
}

}  // namespace spdelab
