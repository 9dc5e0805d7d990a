#include "omkit/io.hpp"

#include "omkit/constants.hpp"
#include "omkit/errors.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace omkit {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Files and CSV plumbing

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) {
        throw IoError("error reading '" + path.string() + "'");
    }
    return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) {
        throw IoError("error writing '" + path.string() + "'");
    }
}

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

// RFC 4180 style: fields may be double-quoted, "" escapes a quote.
std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no)
{
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
            was_quoted = true;
        } else if (c == ',') {
            fields.push_back(was_quoted ? cur : std::string(trim(cur)));
            cur.clear();
            was_quoted = false;
        } else {
            cur.push_back(c);
        }
    }
    if (quoted) {
        throw IoError(fmt::format("line {}: unterminated quoted field", line_no));
    }
    fields.push_back(was_quoted ? cur : std::string(trim(cur)));
    return fields;
}

std::string quote_csv(std::string_view s)
{
    if (s.find_first_of(",\"\n") == std::string_view::npos) {
        return std::string(s);
    }
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') {
            out += "\"\"";
        } else {
            out.push_back(c);
        }
    }
    out.push_back('"');
    return out;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;

    [[nodiscard]] std::optional<std::size_t> column(std::string_view name) const
    {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) {
                return i;
            }
        }
        return std::nullopt;
    }

    [[nodiscard]] std::size_t require_column(std::string_view name) const
    {
        const auto c = column(name);
        if (!c) {
            throw IoError("CSV is missing required column '" + std::string(name) + "'");
        }
        return *c;
    }
};

CsvTable parse_csv(std::string_view text)
{
    CsvTable t;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        const std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (trim(line).empty() || trim(line).front() == '#') {
            if (end == text.size()) {
                break;
            }
            continue;
        }
        auto fields = split_csv_line(line, line_no);
        if (t.header.empty()) {
            t.header = std::move(fields);
        } else {
            if (fields.size() != t.header.size()) {
                throw IoError(fmt::format("line {}: expected {} fields, found {}", line_no, t.header.size(),
                                          fields.size()));
            }
            t.rows.push_back(std::move(fields));
            t.line_numbers.push_back(line_no);
        }
        if (end == text.size()) {
            break;
        }
    }
    if (t.header.empty()) {
        throw IoError("CSV has no header line");
    }
    return t;
}

double parse_number(std::string_view s, std::size_t line_no)
{
    s = trim(s);
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw IoError(fmt::format("line {}: '{}' is not a number", line_no, s));
    }
    return v;
}

// Shortest representation that parses back to the same double.
std::string num(double v) { return fmt::format("{}", v); }

Json read_json_file(const std::filesystem::path& path)
{
    const std::string text = read_text(path);
    try {
        return Json::parse(text);
    } catch (const Json::exception& e) {
        throw IoError("malformed JSON in '" + path.string() + "': " + e.what());
    }
}

template <typename T>
T get_field(const Json& obj, const char* section, const char* key)
{
    if (!obj.contains(key)) {
        throw IoError(fmt::format("{}: missing key '{}'", section, key));
    }
    try {
        return obj.at(key).get<T>();
    } catch (const Json::exception&) {
        throw IoError(fmt::format("{}: key '{}' has the wrong type", section, key));
    }
}

template <typename T>
T get_or(const Json& obj, const char* section, const char* key, T fallback)
{
    return obj.contains(key) ? get_field<T>(obj, section, key) : fallback;
}

const Json& get_section(const Json& doc, const char* name)
{
    if (!doc.contains(name) || !doc.at(name).is_object()) {
        throw IoError(fmt::format("device config: missing section '{}'", name));
    }
    return doc.at(name);
}

} // namespace

// ---------------------------------------------------------------------------
// Device configuration

void DeviceConfig::validate() const
{
    optics.validate();
    mechanics.validate();
    thermal.validate();
    coupling.validate();
    spin.validate();
}

DeviceConfig default_device()
{
    DeviceConfig c;
    c.name = "diamond-microdisk-5um";
    c.optics = {1530e-9, 6.4e4, 6.0e4, 0.0};
    c.mechanics = {2.1e9, 9000.0, 40e-15, kDefaultStrainPerMeter};
    // 50 K rise for ~170 uW absorbed sets K; 10% of the optical loss is absorption.
    c.thermal = {thermo_optic_coefficient(), 3.4e-6, 0.1, to_angular(-220e3) / 1e-3};
    c.coupling = {to_angular(26e3)};
    c.spin = {20e9, 1e5, 1.0};
    return c;
}

DeviceConfig parse_device_config(std::string_view json_text)
{
    Json doc;
    try {
        doc = Json::parse(json_text);
    } catch (const Json::exception& e) {
        throw IoError(std::string("malformed device config JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw IoError("device config must be a JSON object");
    }
    DeviceConfig c;
    c.name = get_or<std::string>(doc, "device config", "name", "");

    const Json& o = get_section(doc, "optics");
    c.optics.lambda_o = get_field<double>(o, "optics", "lambda_o_m");
    c.optics.q_intrinsic = get_field<double>(o, "optics", "q_intrinsic");
    c.optics.q_loaded = get_field<double>(o, "optics", "q_loaded");
    c.optics.doublet_splitting = get_or<double>(o, "optics", "doublet_splitting_rad_s", 0.0);

    const Json& m = get_section(doc, "mechanics");
    c.mechanics.f_m = get_field<double>(m, "mechanics", "f_m_hz");
    c.mechanics.q_m = get_field<double>(m, "mechanics", "q_m");
    c.mechanics.m_eff = get_field<double>(m, "mechanics", "m_eff_kg");
    c.mechanics.strain_per_meter = get_or<double>(m, "mechanics", "strain_per_m", kDefaultStrainPerMeter);

    const Json& t = get_section(doc, "thermal");
    c.thermal.a = get_field<double>(t, "thermal", "a_per_k");
    c.thermal.conductance = get_field<double>(t, "thermal", "conductance_w_per_k");
    c.thermal.absorbed_fraction = get_field<double>(t, "thermal", "absorbed_fraction");
    c.thermal.softening_alpha = get_or<double>(t, "thermal", "softening_alpha_rad_s_per_w", 0.0);

    const Json& g = get_section(doc, "coupling");
    c.coupling.g0 = get_field<double>(g, "coupling", "g0_rad_s");

    if (doc.contains("spin")) {
        const Json& s = get_section(doc, "spin");
        c.spin.ground_state_d = get_field<double>(s, "spin", "ground_state_d_hz_per_strain");
        c.spin.excited_state_factor = get_or<double>(s, "spin", "excited_state_factor", 1e5);
        c.spin.location_derating = get_or<double>(s, "spin", "location_derating", 1.0);
    }
    c.validate();
    return c;
}

std::string format_device_config(const DeviceConfig& c)
{
    Json doc;
    doc["name"] = c.name;
    doc["optics"] = {{"lambda_o_m", c.optics.lambda_o},
                     {"q_intrinsic", c.optics.q_intrinsic},
                     {"q_loaded", c.optics.q_loaded},
                     {"doublet_splitting_rad_s", c.optics.doublet_splitting}};
    doc["mechanics"] = {{"f_m_hz", c.mechanics.f_m},
                        {"q_m", c.mechanics.q_m},
                        {"m_eff_kg", c.mechanics.m_eff},
                        {"strain_per_m", c.mechanics.strain_per_meter}};
    doc["thermal"] = {{"a_per_k", c.thermal.a},
                      {"conductance_w_per_k", c.thermal.conductance},
                      {"absorbed_fraction", c.thermal.absorbed_fraction},
                      {"softening_alpha_rad_s_per_w", c.thermal.softening_alpha}};
    doc["coupling"] = {{"g0_rad_s", c.coupling.g0}};
    doc["spin"] = {{"ground_state_d_hz_per_strain", c.spin.ground_state_d},
                   {"excited_state_factor", c.spin.excited_state_factor},
                   {"location_derating", c.spin.location_derating}};
    return doc.dump(2) + "\n";
}

DeviceConfig read_device_config(const std::filesystem::path& path)
{
    return parse_device_config(read_text(path));
}

void write_device_config(const std::filesystem::path& path, const DeviceConfig& config)
{
    write_text(path, format_device_config(config));
}

// ---------------------------------------------------------------------------
// Traces

std::filesystem::path sidecar_path(const std::filesystem::path& csv)
{
    auto p = csv;
    p.replace_extension(".json");
    return p;
}

void write_sweep(const std::filesystem::path& csv, const SweepTrace& trace)
{
    trace.validate();
    std::string out = "lambda_m,transmission\n";
    for (std::size_t i = 0; i < trace.size(); ++i) {
        out += num(trace.lambda_s[i]) + "," + num(trace.transmission[i]) + "\n";
    }
    write_text(csv, out);
    Json meta = {{"input_power_w", trace.input_power}, {"scan_direction", std::string(to_string(trace.scan_direction))}};
    write_text(sidecar_path(csv), meta.dump(2) + "\n");
}

SweepTrace read_sweep(const std::filesystem::path& csv)
{
    const auto table = parse_csv(read_text(csv));
    const auto cl = table.require_column("lambda_m");
    const auto ct = table.require_column("transmission");
    SweepTrace t;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        t.lambda_s.push_back(parse_number(table.rows[r][cl], table.line_numbers[r]));
        t.transmission.push_back(parse_number(table.rows[r][ct], table.line_numbers[r]));
    }
    const Json meta = read_json_file(sidecar_path(csv));
    t.input_power = get_field<double>(meta, "sweep sidecar", "input_power_w");
    t.scan_direction = scan_direction_from_string(get_field<std::string>(meta, "sweep sidecar", "scan_direction"));
    t.validate();
    return t;
}

void write_spectrum(const std::filesystem::path& csv, const SpectrumTrace& trace)
{
    trace.validate();
    std::string out = "freq_hz,psd\n";
    for (std::size_t i = 0; i < trace.size(); ++i) {
        out += num(trace.freq_hz[i]) + "," + num(trace.psd[i]) + "\n";
    }
    write_text(csv, out);
    Json meta = {{"input_power_w", trace.input_power}, {"detuning_rad_s", trace.detuning}, {"rbw_hz", trace.rbw_hz}};
    meta["seed"] = trace.seed ? Json(*trace.seed) : Json(nullptr);
    write_text(sidecar_path(csv), meta.dump(2) + "\n");
}

SpectrumTrace read_spectrum(const std::filesystem::path& csv)
{
    const auto table = parse_csv(read_text(csv));
    const auto cf = table.require_column("freq_hz");
    const auto cp = table.require_column("psd");
    SpectrumTrace t;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        t.freq_hz.push_back(parse_number(table.rows[r][cf], table.line_numbers[r]));
        t.psd.push_back(parse_number(table.rows[r][cp], table.line_numbers[r]));
    }
    const Json meta = read_json_file(sidecar_path(csv));
    t.input_power = get_field<double>(meta, "spectrum sidecar", "input_power_w");
    t.detuning = get_or<double>(meta, "spectrum sidecar", "detuning_rad_s", 0.0);
    t.rbw_hz = get_or<double>(meta, "spectrum sidecar", "rbw_hz", 0.0);
    if (meta.contains("seed") && !meta.at("seed").is_null()) {
        t.seed = get_field<std::uint64_t>(meta, "spectrum sidecar", "seed");
    }
    t.validate();
    return t;
}

std::string format_backaction_csv(const std::vector<BackactionRecord>& records)
{
    std::string out = "detuning_rad_s,photon_number,dropped_power_w,dgamma_rad_s,domega_rad_s,sigma_rad_s\n";
    for (const auto& r : records) {
        out += fmt::format("{},{},{},{},{},{}\n", num(r.detuning), num(r.photon_number), num(r.dropped_power),
                           num(r.dgamma), num(r.domega), num(r.sigma_dgamma));
    }
    return out;
}

void write_backaction(const std::filesystem::path& csv, const std::vector<BackactionRecord>& records)
{
    write_text(csv, format_backaction_csv(records));
}

std::vector<BackactionRecord> read_backaction(const std::filesystem::path& csv)
{
    const auto table = parse_csv(read_text(csv));
    const auto cd = table.require_column("detuning_rad_s");
    const auto cn = table.require_column("photon_number");
    const auto cg = table.column("dgamma_rad_s");
    const auto cw = table.column("domega_rad_s");
    const auto cp = table.column("dropped_power_w");
    const auto cs = table.column("sigma_rad_s");
    if (!cg && !cw) {
        throw IoError("backaction CSV needs a dgamma_rad_s or domega_rad_s column");
    }
    std::vector<BackactionRecord> out;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const auto ln = table.line_numbers[r];
        BackactionRecord rec;
        rec.detuning = parse_number(row[cd], ln);
        rec.photon_number = parse_number(row[cn], ln);
        rec.dropped_power = cp ? parse_number(row[*cp], ln) : 0.0;
        rec.dgamma = cg ? parse_number(row[*cg], ln) : 0.0;
        rec.domega = cw ? parse_number(row[*cw], ln) : 0.0;
        rec.sigma_dgamma = cs ? parse_number(row[*cs], ln) : 0.0;
        out.push_back(rec);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Fit reports

std::string format_fit_report(const FitResult& fit)
{
    Json params = Json::array();
    for (const auto& p : fit.parameters) {
        // JSON has no infinity; an unbounded interval is written as null.
        Json ci = std::isfinite(p.ci95) ? Json(p.ci95) : Json(nullptr);
        params.push_back({{"parameter", p.name}, {"estimate", p.estimate}, {"ci95", ci}, {"units", p.units}});
    }
    Json doc;
    doc["parameters"] = params;
    doc["status"] = std::string(to_string(fit.status));
    doc["iterations"] = fit.iterations;
    doc["residual_rms"] = fit.residual_rms;
    doc["initial_residual_rms"] = fit.initial_residual_rms;
    if (!fit.starts.empty()) {
        Json starts = Json::array();
        for (const auto& s : fit.starts) {
            starts.push_back({{"initial", s.initial},
                              {"residual_rms", s.residual_rms},
                              {"status", std::string(to_string(s.status))},
                              {"evaluations", s.evaluations}});
        }
        doc["starts"] = starts;
    }
    return doc.dump(2) + "\n";
}

namespace {

FitStatus fit_status_from_string(std::string_view s)
{
    for (const auto st : {FitStatus::converged, FitStatus::max_iterations, FitStatus::singular}) {
        if (to_string(st) == s) {
            return st;
        }
    }
    throw IoError("unknown fit status '" + std::string(s) + "'");
}

} // namespace

FitResult parse_fit_report(std::string_view json_text)
{
    Json doc;
    try {
        doc = Json::parse(json_text);
    } catch (const Json::exception& e) {
        throw IoError(std::string("malformed fit report: ") + e.what());
    }
    FitResult fit;
    for (const auto& p : get_field<Json>(doc, "fit report", "parameters")) {
        FitParameter fp;
        fp.name = get_field<std::string>(p, "fit parameter", "parameter");
        fp.estimate = get_field<double>(p, "fit parameter", "estimate");
        fp.ci95 = p.contains("ci95") && !p.at("ci95").is_null() ? get_field<double>(p, "fit parameter", "ci95")
                                                               : std::numeric_limits<double>::infinity();
        fp.units = get_or<std::string>(p, "fit parameter", "units", "");
        fit.parameters.push_back(fp);
    }
    fit.status = fit_status_from_string(get_field<std::string>(doc, "fit report", "status"));
    fit.iterations = get_field<int>(doc, "fit report", "iterations");
    fit.residual_rms = get_field<double>(doc, "fit report", "residual_rms");
    fit.initial_residual_rms = get_or<double>(doc, "fit report", "initial_residual_rms", 0.0);
    if (doc.contains("starts")) {
        for (const auto& s : doc.at("starts")) {
            StartDiagnostic d;
            d.initial = get_field<std::vector<double>>(s, "fit start", "initial");
            d.residual_rms = get_field<double>(s, "fit start", "residual_rms");
            d.status = fit_status_from_string(get_field<std::string>(s, "fit start", "status"));
            d.evaluations = get_field<int>(s, "fit start", "evaluations");
            fit.starts.push_back(d);
        }
    }
    return fit;
}

// ---------------------------------------------------------------------------
// Q*f survey

std::string_view to_string(Environment env)
{
    switch (env) {
    case Environment::ambient:
        return "ambient";
    case Environment::low_pressure:
        return "low-pressure";
    case Environment::cryogenic:
        return "cryogenic";
    }
    return "ambient";
}

Environment environment_from_string(std::string_view s)
{
    for (const auto e : {Environment::ambient, Environment::low_pressure, Environment::cryogenic}) {
        if (to_string(e) == s) {
            return e;
        }
    }
    throw ValidationError("survey: environment must be ambient, low-pressure or cryogenic, got '" + std::string(s)
                          + "'");
}

void SurveyEntry::validate() const
{
    require(!label.empty(), "survey: label must not be empty");
    require(std::isfinite(qf_hz) && qf_hz > 0.0, "survey: qf_hz must be positive (entry '" + label + "')");
}

std::vector<SurveyEntry> parse_survey(std::string_view csv_text)
{
    const auto table = parse_csv(csv_text);
    const auto cl = table.require_column("label");
    const auto cm = table.require_column("material");
    const auto cs = table.require_column("structure");
    const auto cq = table.require_column("qf_hz");
    const auto ce = table.require_column("environment");
    std::vector<SurveyEntry> out;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        SurveyEntry e;
        e.label = row[cl];
        e.material = row[cm];
        e.structure = row[cs];
        e.qf_hz = parse_number(row[cq], table.line_numbers[r]);
        e.environment = environment_from_string(row[ce]);
        e.validate();
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<SurveyEntry> read_survey(const std::filesystem::path& csv) { return parse_survey(read_text(csv)); }

std::string format_survey(const std::vector<SurveyEntry>& entries)
{
    std::string out = "label,material,structure,qf_hz,environment\n";
    for (const auto& e : entries) {
        out += fmt::format("{},{},{},{},{}\n", quote_csv(e.label), quote_csv(e.material), quote_csv(e.structure),
                           num(e.qf_hz), to_string(e.environment));
    }
    return out;
}

std::vector<SurveyEntry> sort_survey(std::vector<SurveyEntry> entries)
{
    std::stable_sort(entries.begin(), entries.end(), [](const SurveyEntry& a, const SurveyEntry& b) {
        if (a.qf_hz != b.qf_hz) {
            return a.qf_hz > b.qf_hz;
        }
        return a.label < b.label;
    });
    return entries;
}

std::string format_survey_plot_data(const std::vector<SurveyEntry>& sorted)
{
    std::string out = "rank,label,environment,qf_hz,log10_qf_hz\n";
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const auto& e = sorted[i];
        out += fmt::format("{},{},{},{},{:.6f}\n", i + 1, quote_csv(e.label), to_string(e.environment), num(e.qf_hz),
                           std::log10(e.qf_hz));
    }
    return out;
}

} // namespace omkit
