#include "spdelab/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "spdelab/field_io.hpp"
#include "spdelab/rng.hpp"

namespace spdelab {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& msg) { throw std::invalid_argument("config: " + msg); }

void check_keys(const json& obj, const std::string& section, const std::set<std::string>& allowed) {
    if (!obj.is_object()) bad("section '" + section + "' must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key())) bad("unknown key '" + section + "." + it.key() + "'");
}

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback) {
    return obj.contains(key) ? obj.at(key).get<T>() : fallback;
}

DataSpec parse_data_slot(const json& obj, const std::string& section) {
    DataSpec spec;
    if (obj.is_string()) {  // bare string: generator name or file path shortcut
        spec.generator = obj.get<std::string>();
        return spec;
    }
    check_keys(obj, section,
               {"generator", "file", "mode", "center", "width", "amplitude", "kmax", "seed"});
    spec.file = get_or<std::string>(obj, "file", "");
    spec.generator = get_or<std::string>(obj, "generator", spec.file.empty() ? "zero" : "file");
    spec.mode = get_or<std::vector<int>>(obj, "mode", {1});
    spec.center = get_or<std::vector<double>>(obj, "center", {});
    spec.width = get_or<double>(obj, "width", 1.0);
    spec.amplitude = get_or<double>(obj, "amplitude", 1.0);
    spec.kmax = get_or<int>(obj, "kmax", 2);
    spec.seed = get_or<std::uint64_t>(obj, "seed", 0);
    static const std::set<std::string> known{"zero", "sin", "gaussian", "random_bandlimited",
                                            "file"};
    if (!known.count(spec.generator))
        bad("unknown generator '" + spec.generator + "' in '" + section + "'");
    if (spec.generator == "file" && spec.file.empty())
        bad("'" + section + ".file' required for the file generator");
    if (spec.width <= 0.0) bad("'" + section + ".width' must be > 0");
    if (spec.kmax < 0) bad("'" + section + ".kmax' must be >= 0");
    return spec;
}

}  // namespace

std::vector<double> RunConfig::time_grid() const {
    std::vector<double> t(static_cast<std::size_t>(M) + 1);
    for (int m = 0; m <= M; ++m) t[m] = T * m / M;
    return t;
}

RunConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        bad(std::string("not valid JSON: ") + e.what());
    }
    check_keys(doc, "<root>", {"grid", "time", "coefficients", "data", "norms", "mc"});

    RunConfig cfg;

    const json grid = doc.value("grid", json::object());
    check_keys(grid, "grid", {"d", "n", "L"});
    cfg.grid = Grid(get_or<int>(grid, "d", 1), get_or<int>(grid, "n", 64),
                    get_or<double>(grid, "L", 2.0 * 3.14159265358979323846));

    const json time = doc.value("time", json::object());
    check_keys(time, "time", {"T", "M"});
    cfg.T = get_or<double>(time, "T", 1.0);
    cfg.M = get_or<int>(time, "M", 64);
    if (!(cfg.T > 0.0)) bad("time.T must be > 0");
    if (cfg.M < 1) bad("time.M must be >= 1");

    const json co = doc.value("coefficients", json::object());
    check_keys(co, "coefficients", {"family", "params", "K"});
    cfg.family.kind = family_from_name(get_or<std::string>(co, "family", "constant_elliptic"));
    cfg.K = get_or<int>(co, "K", 8);
    if (cfg.K < 1) bad("coefficients.K must be >= 1");
    const json params = co.value("params", json::object());
    check_keys(params, "coefficients.params",
               {"kappa", "window_fraction", "theta", "scale", "sigma_scale", "degenerate_rank",
                "degenerate_stride"});
    cfg.family.kappa = get_or<double>(params, "kappa", cfg.family.kappa);
    cfg.family.window_fraction = get_or<double>(params, "window_fraction", cfg.family.window_fraction);
    cfg.family.theta = get_or<double>(params, "theta", cfg.family.theta);
    cfg.family.scale = get_or<double>(params, "scale", cfg.family.scale);
    cfg.family.sigma_scale = get_or<double>(params, "sigma_scale", cfg.family.sigma_scale);
    cfg.family.degenerate_rank = get_or<int>(params, "degenerate_rank", cfg.family.degenerate_rank);
    cfg.family.degenerate_stride =
        get_or<int>(params, "degenerate_stride", cfg.family.degenerate_stride);

    const json data = doc.value("data", json::object());
    check_keys(data, "data", {"u0", "f", "g"});
    if (data.contains("u0")) cfg.u0 = parse_data_slot(data.at("u0"), "data.u0");
    if (data.contains("f")) cfg.f = parse_data_slot(data.at("f"), "data.f");
    if (data.contains("g")) cfg.g = parse_data_slot(data.at("g"), "data.g");

    const json norms = doc.value("norms", json::object());
    check_keys(norms, "norms", {"gamma", "p"});
    cfg.gamma = get_or<double>(norms, "gamma", 0.0);
    cfg.p = get_or<double>(norms, "p", 2.0);
    if (cfg.p < 2.0) bad("norms.p must be >= 2");

    const json mc = doc.value("mc", json::object());
    check_keys(mc, "mc", {"paths", "seed"});
    cfg.paths = get_or<int>(mc, "paths", 100);
    cfg.seed = get_or<std::uint64_t>(mc, "seed", 1);
    if (cfg.paths < 1) bad("mc.paths must be >= 1");

    cfg.raw_json = doc.dump();  // canonical (sorted-key) echo
    return cfg;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("config: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return parse_config_text(text);
}

std::uint64_t config_hash(const RunConfig& config) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : config.raw_json) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

Spectrum make_data(const DataSpec& spec, const Grid& grid, int arity) {
    if (spec.generator == "file" || !spec.file.empty()) {
        Spectrum s = forward_transform(read_field(spec.file));
        if (!(s.grid == grid) || s.arity != arity)
            throw std::invalid_argument("data file does not match grid/arity: " + spec.file);
        return s;
    }
    if (spec.generator == "zero") return Spectrum(grid, arity);

    GridField field(grid, arity);
    int idx[3];
    if (spec.generator == "sin") {
        if (static_cast<int>(spec.mode.size()) != grid.d)
            throw std::invalid_argument("config: sin generator needs one mode entry per axis");
        for (std::size_t i = 0; i < grid.size(); ++i) {
            grid.unflatten(i, idx);
            double v = spec.amplitude;
            for (int ax = 0; ax < grid.d; ++ax)
                if (spec.mode[ax] != 0)
                    v *= std::sin(2.0 * 3.14159265358979323846 * spec.mode[ax] * idx[ax] /
                                  grid.n);
            for (int c = 0; c < arity; ++c) field.at(i, c) = v / (c + 1);
        }
        return forward_transform(field);
    }
    if (spec.generator == "gaussian") {
        std::vector<double> center(grid.d, grid.L / 2.0);
        if (!spec.center.empty()) {
            if (static_cast<int>(spec.center.size()) != grid.d)
                throw std::invalid_argument("config: gaussian center needs one entry per axis");
            center = spec.center;
        }
        for (std::size_t i = 0; i < grid.size(); ++i) {
            grid.unflatten(i, idx);
            double r2 = 0.0;
            for (int ax = 0; ax < grid.d; ++ax) {
                double dx = std::fmod(idx[ax] * grid.h() - center[ax], grid.L);
                if (dx > grid.L / 2.0) dx -= grid.L;
                if (dx < -grid.L / 2.0) dx += grid.L;
                r2 += dx * dx;
            }
            const double v = spec.amplitude * std::exp(-r2 / (2.0 * spec.width * spec.width));
            for (int c = 0; c < arity; ++c) field.at(i, c) = v / (c + 1);
        }
        return forward_transform(field);
    }
    if (spec.generator == "random_bandlimited") {
        // white noise per component, low-passed to |k_signed| <= kmax per axis
        for (int c = 0; c < arity; ++c) {
            Rng rng(spec.seed, static_cast<std::uint64_t>(c), "data");
            for (std::size_t i = 0; i < grid.size(); ++i)
                field.at(i, c) = cplx{spec.amplitude * rng.normal(), 0.0};
        }
        Spectrum s = forward_transform(field);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            grid.unflatten(i, idx);
            bool keep = true;
            for (int ax = 0; ax < grid.d; ++ax)
                if (std::abs(grid.signed_index(idx[ax])) > spec.kmax) keep = false;
            if (!keep)
                for (int c = 0; c < arity; ++c) s.at(i, c) = cplx{};
        }
        return s;
    }
    throw std::invalid_argument("config: unknown generator '" + spec.generator + "'");
}

}  // namespace spdelab
