#include "mkdv/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <unistd.h>

namespace mkdv::io {

namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_atomic(const fs::path& path, const std::function<void(std::ostream&)>& body) {
    if (path.empty()) throw OutputError("no output path given");
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw OutputError("output directory does not exist: " + dir.string());
    if (fs::is_directory(path, ec)) throw OutputError("output path is a directory: " + path.string());

    const fs::path tmp = dir / ("." + path.filename().string() + ".tmp" + std::to_string(::getpid()));
    try {
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw OutputError("cannot open " + tmp.string() + " for writing");
            body(out);
            out.flush();
            if (!out) throw OutputError("write failed for " + path.string());
        }
        fs::rename(tmp, path);
    } catch (...) {
        fs::remove(tmp, ec);
        throw;
    }
}

Json load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    if (j.contains("schema_version")) {
        if (!j["schema_version"].is_number_integer() || j["schema_version"].get<int>() != kSchemaVersion)
            throw ConfigError("unsupported schema_version (expected " + std::to_string(kSchemaVersion) + ")");
    }
    return j;
}

void require_keys_within(const Json& obj, const std::vector<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const auto& a : allowed) known = known || key == a;
        if (!known) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

void write_field_header(std::ostream& out, const std::string& description) {
    out << "# " << description << "\n"
        << "# u solves u_t + u_xxx = -6 u^2 u_x; x and t dimensionless\n"
        << "t,x,u\n";
}

void write_field_rows(std::ostream& out, double t, std::span<const double> xs, std::span<const double> u) {
    const std::string ts = format_double(t);
    for (std::size_t m = 0; m < xs.size(); ++m) out << ts << ',' << format_double(xs[m]) << ',' << format_double(u[m]) << '\n';
}

namespace {

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
    if (!j.contains(key) || j[key].is_null()) return fallback;
    try {
        return j[key].get<T>();
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json slope_json(const std::optional<inflation::SlopeFit>& s) {
    if (!s) return nullptr;
    return Json{{"slope", s->slope}, {"halfwidth", s->halfwidth}};
}

}  // namespace

inflation::ExperimentSchedule schedule_from_json(const Json& j) {
    require_keys_within(j,
                        {"schema_version", "p", "s", "N_list", "theta", "lambda_sign", "C_T", "K", "eta_refinement",
                         "seed"},
                        "schedule");
    if (!j.contains("p")) throw ConfigError("schedule needs 'p'");
    inflation::ExperimentSchedule s;
    s.norm.p = get_or<double>(j, "p", 0.0);
    s.norm.s = get_or<double>(j, "s", 0.0);
    s.N_list = get_or<std::vector<int>>(j, "N_list", {});
    if (j.contains("theta") && !j["theta"].is_null()) s.theta = get_or<double>(j, "theta", 0.0);
    s.lambda_sign = get_or<int>(j, "lambda_sign", 0);
    s.C_T = get_or<double>(j, "C_T", 1.0);
    s.K = get_or<std::size_t>(j, "K", 64);
    s.eta_refinement = get_or<double>(j, "eta_refinement", 1.0);
    s.seed = get_or<std::uint64_t>(j, "seed", 0);
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return s;
}

Json schedule_to_json(const inflation::ExperimentSchedule& s) {
    return Json{{"schema_version", kSchemaVersion},
                {"p", s.norm.p},
                {"s", s.norm.s},
                {"N_list", s.N_list},
                {"theta", optional_number(s.theta)},
                {"lambda_sign", s.lambda_sign},
                {"C_T", s.C_T},
                {"K", s.K},
                {"eta_refinement", s.eta_refinement},
                {"seed", s.seed}};
}

Json result_to_json(const inflation::ExperimentResult& r) {
    Json rows = Json::array();
    for (const auto& row : r.rows) {
        rows.push_back(Json{{"N", row.N},
                            {"lambda", row.lambda},
                            {"T", row.T},
                            {"initial_norm", row.initial_norm},
                            {"min_norm", row.min_norm},
                            {"t_star", row.t_star},
                            {"lower_bound", row.lower_bound},
                            {"final_norm", row.final_norm},
                            {"ratio", row.ratio},
                            {"status", row.status},
                            {"message", row.message}});
    }
    Json out{{"schema_version", kSchemaVersion},
             {"schedule", schedule_to_json(r.schedule)},
             {"exponents", Json{{"p", r.exponents.p}, {"theta", r.exponents.theta}, {"alpha", r.exponents.alpha}}},
             {"regime", r.schedule.norm.p > 2.0 ? "small-norm window (reverse in time)" : "dual lower bound"},
             {"rows", rows},
             {"slopes",
              Json{{"initial", slope_json(r.initial_slope)},
                   {"final", slope_json(r.final_slope)},
                   {"scaled_final", slope_json(r.scaled_final_slope)},
                   {"ratio", slope_json(r.ratio_slope)}}},
             {"all_ok", r.all_ok()}};
    if (r.schedule.norm.p > 2.0) {
        // The time-reversed solution starts from the small norm and reaches the large one at t_*.
        Json rev = Json::array();
        for (const auto& row : r.rows)
            if (row.ok())
                rev.push_back(Json{{"N", row.N}, {"norm_at_0", row.final_norm}, {"norm_at_t_star", row.initial_norm},
                                   {"t_star", row.t_star}});
        out["reversed"] = rev;
    }
    return out;
}

void write_result_csv(std::ostream& out, const inflation::ExperimentResult& r) {
    const auto& sc = r.schedule;
    out << "# inflation experiment p=" << format_double(sc.norm.p) << " s=" << format_double(sc.norm.s)
        << " alpha=" << format_double(r.exponents.alpha) << " theta=" << format_double(r.exponents.theta)
        << " C_T=" << format_double(sc.C_T) << " K=" << sc.K << "\n"
        << "# norms are FL^p_s with f^(xi) = (2 pi)^(-1/2) int e^(-i x xi) f(x) dx and weight (1 + xi^2)^(s/2)\n"
        << "# lambda = N^(p (1 " << (sc.effective_sign() > 0 ? '+' : '-') << " alpha/2)); T = C_T lambda^3 N^(q/2-1-theta)"
        << "; t_star = argmin over K samples of [T, 2T]\n"
        << "N,lambda,T,initial_norm,min_norm,t_star,lower_bound,final_norm,ratio,status\n";
    for (const auto& row : r.rows) {
        out << row.N << ',' << format_double(row.lambda) << ',' << format_double(row.T) << ','
            << format_double(row.initial_norm) << ',' << format_double(row.min_norm) << ','
            << format_double(row.t_star) << ',' << format_double(row.lower_bound) << ','
            << format_double(row.final_norm) << ',' << format_double(row.ratio) << ',' << row.status << '\n';
    }
}

void write_series_csv(std::ostream& out, const inflation::ExperimentResult& r) {
    out << "# plot series: ln-ln against N; scaled_final = final_norm * lambda^(1/p)\n"
        << "N,lambda,initial_norm,final_norm,scaled_final,ratio\n";
    const double p = r.schedule.norm.p;
    for (const auto& row : r.rows) {
        if (!row.ok()) continue;
        out << row.N << ',' << format_double(row.lambda) << ',' << format_double(row.initial_norm) << ','
            << format_double(row.final_norm) << ',' << format_double(row.final_norm * std::pow(row.lambda, 1.0 / p))
            << ',' << format_double(row.ratio) << '\n';
    }
}

}  // namespace mkdv::io
