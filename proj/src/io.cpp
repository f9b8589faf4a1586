#include "lrtc/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace lrtc {

namespace {

constexpr std::size_t kHeaderBytes = 4 + 4 + 3 * 8;

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void append_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void append_u64(std::vector<unsigned char>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

std::uint32_t load_u32(const unsigned char* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return v;
}

std::uint64_t load_u64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

struct ParsedHeader {
    Dims dims;
};

void write_header(std::ofstream& os, const char* magic, const Dims& dims) {
    std::vector<unsigned char> h;
    h.reserve(kHeaderBytes);
    for (int i = 0; i < 4; ++i) h.push_back(static_cast<unsigned char>(magic[i]));
    append_u32(h, 1);
    for (std::size_t d : dims) append_u64(h, static_cast<std::uint64_t>(d));
    os.write(reinterpret_cast<const char*>(h.data()), static_cast<std::streamsize>(h.size()));
}

ParsedHeader read_header(std::ifstream& is, const std::string& path, const char* magic) {
    unsigned char h[kHeaderBytes];
    is.read(reinterpret_cast<char*>(h), kHeaderBytes);
    if (static_cast<std::size_t>(is.gcount()) != kHeaderBytes) {
        throw std::runtime_error(path + ": truncated header: expected " +
                                 std::to_string(kHeaderBytes) + " bytes, got " +
                                 std::to_string(is.gcount()));
    }
    const std::string got(reinterpret_cast<const char*>(h), 4);
    if (got != magic) {
        throw std::runtime_error(path + ": bad magic: expected " + magic + ", got \"" + got +
                                 "\"");
    }
    const std::uint32_t version = load_u32(h + 4);
    if (version != 1) {
        throw std::runtime_error(path + ": unsupported format version " +
                                 std::to_string(version) + ", expected 1");
    }
    ParsedHeader out;
    for (int k = 0; k < 3; ++k) {
        const std::uint64_t d = load_u64(h + 8 + 8 * k);
        if (d == 0) throw std::runtime_error(path + ": zero extent in header");
        out.dims[static_cast<std::size_t>(k)] = static_cast<std::size_t>(d);
    }
    return out;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    return os;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path + " for reading");
    return is;
}

// Reads exactly `want` payload bytes and rejects both truncated and
// oversized files, reporting expected vs. actual byte counts.
std::vector<unsigned char> read_payload(std::ifstream& is, const std::string& path,
                                        std::size_t want) {
    std::vector<unsigned char> buf(want);
    is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(want));
    const std::size_t got = static_cast<std::size_t>(is.gcount());
    if (got != want) {
        throw std::runtime_error(path + ": truncated payload: expected " + std::to_string(want) +
                                 " bytes, got " + std::to_string(got));
    }
    if (is.peek() != std::ifstream::traits_type::eof()) {
        throw std::runtime_error(path + ": trailing data after " + std::to_string(want) +
                                 " payload bytes");
    }
    return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == sep) {
            fields.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return fields;
}

std::string strip(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

std::size_t parse_index(const std::string& s, const std::string& where) {
    std::size_t v = 0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || s.empty()) {
        throw std::runtime_error(where + ": cannot parse index \"" + s + "\"");
    }
    return v;
}

double parse_real(const std::string& s, const std::string& where) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || s.empty()) {
        throw std::runtime_error(where + ": cannot parse value \"" + s + "\"");
    }
    if (!std::isfinite(v)) throw std::runtime_error(where + ": non-finite value \"" + s + "\"");
    return v;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

std::string join_doubles(const double* v, std::size_t n) {
    std::string out;
    for (std::size_t i = 0; i < n; ++i) {
        if (i) out += ',';
        out += fmt_double(v[i]);
    }
    return out;
}

}  // namespace

void write_tensor(const std::string& path, const Tensor3& t) {
    if (t.size() == 0) throw std::invalid_argument("write_tensor: empty tensor");
    std::ofstream os = open_out(path);
    write_header(os, "TSR3", t.dims());
    std::vector<unsigned char> buf;
    buf.reserve(8 * 65536);
    const std::vector<double>& data = t.data();
    for (std::size_t i = 0; i < data.size(); ++i) {
        append_u64(buf, std::bit_cast<std::uint64_t>(data[i]));
        if (buf.size() >= 8 * 65536) {
            os.write(reinterpret_cast<const char*>(buf.data()),
                     static_cast<std::streamsize>(buf.size()));
            buf.clear();
        }
    }
    if (!buf.empty()) {
        os.write(reinterpret_cast<const char*>(buf.data()),
                 static_cast<std::streamsize>(buf.size()));
    }
    if (!os) throw std::runtime_error("write failed for " + path);
}

Tensor3 read_tensor(const std::string& path) {
    std::ifstream is = open_in(path);
    const ParsedHeader h = read_header(is, path, "TSR3");
    const std::size_t n = total_size(h.dims);
    const std::vector<unsigned char> buf = read_payload(is, path, 8 * n);
    std::vector<double> data(n);
    for (std::size_t i = 0; i < n; ++i) {
        data[i] = std::bit_cast<double>(load_u64(buf.data() + 8 * i));
        if (!std::isfinite(data[i])) {
            throw std::runtime_error(path + ": non-finite value at entry " + std::to_string(i));
        }
    }
    return Tensor3::from_data(h.dims, std::move(data));
}

void write_mask(const std::string& path, const MaskTensor& m) {
    if (m.size() == 0) throw std::invalid_argument("write_mask: empty mask");
    std::ofstream os = open_out(path);
    write_header(os, "MSK3", m.dims());
    os.write(reinterpret_cast<const char*>(m.bits().data()),
             static_cast<std::streamsize>(m.size()));
    if (!os) throw std::runtime_error("write failed for " + path);
}

MaskTensor read_mask(const std::string& path) {
    std::ifstream is = open_in(path);
    const ParsedHeader h = read_header(is, path, "MSK3");
    const std::size_t n = total_size(h.dims);
    std::vector<unsigned char> buf = read_payload(is, path, n);
    std::vector<std::uint8_t> bits(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (buf[i] > 1) {
            throw std::runtime_error(path + ": invalid mask byte " + std::to_string(buf[i]) +
                                     " at offset " + std::to_string(kHeaderBytes + i));
        }
        bits[i] = buf[i];
    }
    return MaskTensor::from_bits(h.dims, std::move(bits));
}

std::pair<Tensor3, MaskTensor> ingest_csv(const std::string& path, std::optional<Dims> dims) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path + " for reading");

    std::optional<Dims> file_dims;
    bool header_seen = false;
    std::vector<double> values;
    std::vector<std::uint8_t> bits;
    std::vector<std::uint8_t> seen;
    Dims d{0, 0, 0};

    auto ensure_allocated = [&](const std::string& where) {
        if (!values.empty()) return;
        if (dims && file_dims && *dims != *file_dims) {
            throw std::runtime_error(where + ": declared dims disagree with the # dims= line");
        }
        if (!dims && !file_dims) {
            throw std::runtime_error(where +
                                     ": dims unknown: pass them explicitly or add a # dims= line "
                                     "before the first data row");
        }
        d = dims ? *dims : *file_dims;
        if (d[0] == 0 || d[1] == 0 || d[2] == 0) {
            throw std::runtime_error(where + ": dims must all be positive");
        }
        values.assign(total_size(d), 0.0);
        bits.assign(total_size(d), 0);
        seen.assign(total_size(d), 0);
    };

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string where = path + ":" + std::to_string(lineno);
        const std::string trimmed = strip(line);
        if (trimmed.empty()) continue;
        if (trimmed[0] == '#') {
            std::string body = strip(trimmed.substr(1));
            if (body.rfind("dims=", 0) == 0) {
                const std::vector<std::string> parts = split(body.substr(5), ',');
                if (parts.size() != 3) {
                    throw std::runtime_error(where + ": dims line needs three extents");
                }
                Dims fd;
                for (int k = 0; k < 3; ++k) {
                    fd[static_cast<std::size_t>(k)] =
                        parse_index(strip(parts[static_cast<std::size_t>(k)]), where);
                }
                file_dims = fd;
            }
            continue;
        }
        if (!header_seen) {
            if (trimmed != "interval,location,day,value") {
                throw std::runtime_error(where +
                                         ": expected header interval,location,day,value, got \"" +
                                         trimmed + "\"");
            }
            header_seen = true;
            continue;
        }
        ensure_allocated(where);
        const std::vector<std::string> fields = split(trimmed, ',');
        if (fields.size() != 4) {
            throw std::runtime_error(where + ": expected 4 fields, got " +
                                     std::to_string(fields.size()));
        }
        const std::size_t i1 = parse_index(strip(fields[0]), where);
        const std::size_t i2 = parse_index(strip(fields[1]), where);
        const std::size_t i3 = parse_index(strip(fields[2]), where);
        if (i1 >= d[0] || i2 >= d[1] || i3 >= d[2]) {
            throw std::runtime_error(where + ": index (" + std::to_string(i1) + "," +
                                     std::to_string(i2) + "," + std::to_string(i3) +
                                     ") out of range for dims " + std::to_string(d[0]) + "," +
                                     std::to_string(d[1]) + "," + std::to_string(d[2]));
        }
        const std::size_t idx = (i1 * d[1] + i2) * d[2] + i3;
        if (seen[idx]) {
            throw std::runtime_error(where + ": duplicate key (" + std::to_string(i1) + "," +
                                     std::to_string(i2) + "," + std::to_string(i3) + ")");
        }
        seen[idx] = 1;
        const std::string value = strip(fields[3]);
        if (!value.empty()) {
            values[idx] = parse_real(value, where);
            bits[idx] = 1;
        }
    }
    if (!header_seen) {
        throw std::runtime_error(path + ": missing header interval,location,day,value");
    }
    ensure_allocated(path);
    return {Tensor3::from_data(d, std::move(values)), MaskTensor::from_bits(d, std::move(bits))};
}

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << content;
    if (!os) throw std::runtime_error("write failed for " + path);
}

}  // namespace

void write_report(const std::string& path, const ImputationReport& rep) {
    if (ends_with(path, ".json")) {
        nlohmann::json j;
        j["format"] = "lrtc-report-v1";
        j["converged"] = rep.converged;
        j["iterations"] = rep.iterations;
        if (!rep.residual_trace.empty()) j["residual_final"] = rep.residual_trace.back();
        j["residual_trace"] = rep.residual_trace;
        j["realized_missing_rate"] = rep.realized_missing_rate;
        j["truncation_ranks"] = rep.truncation_ranks;
        j["per_mode_spn"] = rep.per_mode_spn;
        if (rep.mae) j["mae"] = *rep.mae;
        if (rep.rmse) j["rmse"] = *rep.rmse;
        if (rep.mae) j["masked_count"] = rep.masked_count;
        j["p"] = rep.solver_config.p;
        j["theta"] = rep.solver_config.theta;
        if (rep.theta0) j["theta0"] = *rep.theta0;
        if (rep.beta) j["beta"] = *rep.beta;
        if (rep.missing) {
            j["pattern"] = pattern_name(rep.missing->pattern);
            j["rate"] = rep.missing->rate;
            j["seed"] = rep.missing->seed;
        }
        j["alpha"] = rep.solver_config.alpha;
        j["mu0"] = rep.solver_config.mu0;
        j["mu_growth"] = rep.solver_config.mu_growth;
        j["mu_cap"] = rep.solver_config.mu_cap;
        j["epsilon"] = rep.solver_config.epsilon;
        j["max_iters"] = rep.solver_config.max_iters;
        j["gst_inner_iters"] = rep.solver_config.gst_inner_iters;
        j["gst_inner_tol"] = rep.solver_config.gst_inner_tol;
        j["wall_time_seconds"] = rep.wall_time_seconds;
        write_text_file(path, j.dump(2) + "\n");
        return;
    }

    std::string out;
    out += "format=lrtc-report-v1\n";
    out += std::string("converged=") + (rep.converged ? "true" : "false") + "\n";
    out += "iterations=" + std::to_string(rep.iterations) + "\n";
    if (!rep.residual_trace.empty()) {
        out += "residual_final=" + fmt_double(rep.residual_trace.back()) + "\n";
    }
    out += "realized_missing_rate=" + fmt_double(rep.realized_missing_rate) + "\n";
    out += "truncation_ranks=" + std::to_string(rep.truncation_ranks[0]) + "," +
           std::to_string(rep.truncation_ranks[1]) + "," +
           std::to_string(rep.truncation_ranks[2]) + "\n";
    out += "per_mode_spn=" + join_doubles(rep.per_mode_spn.data(), 3) + "\n";
    if (rep.mae) out += "mae=" + fmt_double(*rep.mae) + "\n";
    if (rep.rmse) out += "rmse=" + fmt_double(*rep.rmse) + "\n";
    if (rep.mae) out += "masked_count=" + std::to_string(rep.masked_count) + "\n";
    out += "p=" + fmt_double(rep.solver_config.p) + "\n";
    out += "theta=" + fmt_double(rep.solver_config.theta) + "\n";
    if (rep.theta0) out += "theta0=" + fmt_double(*rep.theta0) + "\n";
    if (rep.beta) out += "beta=" + fmt_double(*rep.beta) + "\n";
    if (rep.missing) {
        out += "pattern=" + pattern_name(rep.missing->pattern) + "\n";
        out += "rate=" + fmt_double(rep.missing->rate) + "\n";
        out += "seed=" + std::to_string(rep.missing->seed) + "\n";
    }
    out += "alpha=" + join_doubles(rep.solver_config.alpha.data(), 3) + "\n";
    out += "mu0=" + fmt_double(rep.solver_config.mu0) + "\n";
    out += "mu_growth=" + fmt_double(rep.solver_config.mu_growth) + "\n";
    out += "mu_cap=" + fmt_double(rep.solver_config.mu_cap) + "\n";
    out += "epsilon=" + fmt_double(rep.solver_config.epsilon) + "\n";
    out += "max_iters=" + std::to_string(rep.solver_config.max_iters) + "\n";
    out += "gst_inner_iters=" + std::to_string(rep.solver_config.gst_inner_iters) + "\n";
    out += "gst_inner_tol=" + fmt_double(rep.solver_config.gst_inner_tol) + "\n";
    if (!rep.residual_trace.empty()) {
        out += "residual_trace=" +
               join_doubles(rep.residual_trace.data(), rep.residual_trace.size()) + "\n";
    }
    out += "wall_time_seconds=" + fmt_double(rep.wall_time_seconds) + "\n";
    write_text_file(path, out);
}

void write_score_report(const std::string& path, const ScoreStats& stats,
                        double wall_time_seconds) {
    if (ends_with(path, ".json")) {
        nlohmann::json j;
        j["format"] = "lrtc-score-v1";
        j["mae"] = stats.mae;
        j["rmse"] = stats.rmse;
        j["masked_count"] = stats.masked_count;
        j["wall_time_seconds"] = wall_time_seconds;
        write_text_file(path, j.dump(2) + "\n");
        return;
    }
    std::string out;
    out += "format=lrtc-score-v1\n";
    out += "mae=" + fmt_double(stats.mae) + "\n";
    out += "rmse=" + fmt_double(stats.rmse) + "\n";
    out += "masked_count=" + std::to_string(stats.masked_count) + "\n";
    out += "wall_time_seconds=" + fmt_double(wall_time_seconds) + "\n";
    write_text_file(path, out);
}

SweepFileConfig parse_sweep_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path + " for reading");

    SweepFileConfig cfg;
    bool have_patterns = false;
    bool have_rates = false;
    bool have_p = false;
    bool have_theta0 = false;
    bool have_beta = false;

    auto parse_list = [](const std::string& v, const std::string& where) {
        std::vector<double> out;
        for (const std::string& part : split(v, ',')) {
            out.push_back(parse_real(strip(part), where));
        }
        return out;
    };

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string where = path + ":" + std::to_string(lineno);
        const std::string trimmed = strip(line);
        if (trimmed.empty() || trimmed[0] == '#') continue;
        const std::size_t eq = trimmed.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error(where + ": expected key=value, got \"" + trimmed + "\"");
        }
        const std::string key = strip(trimmed.substr(0, eq));
        const std::string value = strip(trimmed.substr(eq + 1));
        if (key == "data") {
            cfg.data_path = value;
        } else if (key == "native_mask") {
            cfg.native_mask_path = value;
        } else if (key == "patterns") {
            cfg.grid.patterns.clear();
            for (const std::string& part : split(value, ',')) {
                try {
                    cfg.grid.patterns.push_back(pattern_from_name(strip(part)));
                } catch (const std::exception& e) {
                    throw std::runtime_error(where + ": " + e.what());
                }
            }
            have_patterns = true;
        } else if (key == "rates") {
            cfg.grid.rates = parse_list(value, where);
            have_rates = true;
        } else if (key == "p") {
            cfg.grid.p_values = parse_list(value, where);
            have_p = true;
        } else if (key == "theta0") {
            cfg.grid.theta0_values = parse_list(value, where);
            have_theta0 = true;
        } else if (key == "beta") {
            cfg.grid.beta_values = parse_list(value, where);
            have_beta = true;
        } else if (key == "repetitions") {
            cfg.grid.repetitions = static_cast<int>(parse_index(value, where));
        } else if (key == "base_seed") {
            std::uint64_t v = 0;
            auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
            if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) {
                throw std::runtime_error(where + ": cannot parse seed \"" + value + "\"");
            }
            cfg.grid.base_seed = v;
        } else if (key == "workers") {
            cfg.grid.workers = static_cast<int>(parse_index(value, where));
        } else if (key == "epsilon") {
            cfg.grid.base.epsilon = parse_real(value, where);
        } else if (key == "max_iters") {
            cfg.grid.base.max_iters = static_cast<int>(parse_index(value, where));
        } else if (key == "mu0") {
            cfg.grid.base.mu0 = parse_real(value, where);
        } else if (key == "mu_growth") {
            cfg.grid.base.mu_growth = parse_real(value, where);
        } else if (key == "mu_cap") {
            cfg.grid.base.mu_cap = parse_real(value, where);
        } else if (key == "alpha") {
            const std::vector<double> a = parse_list(value, where);
            if (a.size() != 3) throw std::runtime_error(where + ": alpha needs three weights");
            cfg.grid.base.alpha = {a[0], a[1], a[2]};
        } else if (key == "gst_inner_iters") {
            cfg.grid.base.gst_inner_iters = static_cast<int>(parse_index(value, where));
        } else if (key == "gst_inner_tol") {
            cfg.grid.base.gst_inner_tol = parse_real(value, where);
        } else {
            throw std::runtime_error(where + ": unknown key \"" + key + "\"");
        }
    }
    if (cfg.data_path.empty()) throw std::runtime_error(path + ": missing required key data");
    if (!have_patterns) throw std::runtime_error(path + ": missing required key patterns");
    if (!have_rates) throw std::runtime_error(path + ": missing required key rates");
    if (!have_p) throw std::runtime_error(path + ": missing required key p");
    if (!have_theta0) throw std::runtime_error(path + ": missing required key theta0");
    if (!have_beta) throw std::runtime_error(path + ": missing required key beta");
    cfg.grid.validate();
    return cfg;
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
    std::string out =
        "pattern,rate,p,theta0,beta,repetition,seed,realized_missing_rate,theta,iterations,"
        "converged,mae,rmse,masked_count,wall_time_seconds,error\n";
    for (const SweepRow& row : rows) {
        out += pattern_name(row.pattern);
        out += ',' + fmt_double(row.rate);
        out += ',' + fmt_double(row.p);
        out += ',' + fmt_double(row.theta0);
        out += ',' + fmt_double(row.beta);
        out += ',' + std::to_string(row.repetition);
        out += ',' + std::to_string(row.seed);
        if (row.report) {
            const ImputationReport& r = *row.report;
            out += ',' + fmt_double(r.realized_missing_rate);
            out += ',' + fmt_double(r.solver_config.theta);
            out += ',' + std::to_string(r.iterations);
            out += std::string(",") + (r.converged ? "true" : "false");
            out += ',' + (r.mae ? fmt_double(*r.mae) : std::string());
            out += ',' + (r.rmse ? fmt_double(*r.rmse) : std::string());
            out += ',' + std::to_string(r.masked_count);
            out += ',' + fmt_double(r.wall_time_seconds);
            out += ",";
        } else {
            out += ",,,,,,,,,";
            out += csv_escape(row.error);
        }
        out += '\n';
    }
    write_text_file(path, out);
}

}  // namespace lrtc
