#include "mpskit/serialize.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mpskit/error.hpp"

namespace mpskit {

using nlohmann::json;

namespace {

json feature_map_to_json(const FeatureMap& fm) {
    json j;
    j["kind"] = fm.kind_name();
    j["dim"] = fm.dim();
    if (fm.kind() == FeatureKind::Custom) j["rows"] = fm.rows();
    return j;
}

FeatureMap feature_map_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "binary_indicator") return FeatureMap::binary_indicator();
    if (kind == "affine_one") return FeatureMap::affine_one();
    if (kind == "trig_pair") return FeatureMap::trig_pair();
    if (kind == "custom") {
        return FeatureMap::custom(
            j.at("rows").get<std::vector<std::vector<double>>>());
    }
    throw_error(ErrorKind::Parse, "unknown feature map kind '" + kind + "'");
}

json mps_to_json(const Mps& mps, const std::vector<FeatureMap>& fms) {
    json j;
    j["format"] = "mpskit-mps";
    j["version"] = 1;
    j["boundary"] = mps.boundary == Boundary::Open ? "open" : "periodic";
    if (mps.label_site) {
        j["label_site"] = *mps.label_site;
    } else {
        j["label_site"] = nullptr;
    }
    json sites = json::array();
    for (const auto& site : mps.sites) {
        json s;
        s["left_bond"] = site.left_bond;
        s["phys_dim"] = site.phys_dim;
        s["right_bond"] = site.right_bond;
        s["label_dim"] = site.label_dim;
        s["data"] = site.data;
        sites.push_back(std::move(s));
    }
    j["sites"] = std::move(sites);
    json maps = json::array();
    for (const auto& fm : fms) maps.push_back(feature_map_to_json(fm));
    j["feature_maps"] = std::move(maps);
    return j;
}

LoadedMps mps_from_json(const json& j) {
    if (j.value("format", "") != "mpskit-mps") {
        throw_error(ErrorKind::Parse, "not an mpskit-mps document");
    }
    if (j.value("version", 0) != 1) {
        throw_error(ErrorKind::Parse, "unsupported mpskit-mps version");
    }
    LoadedMps out;
    const std::string boundary = j.at("boundary").get<std::string>();
    if (boundary == "open") {
        out.mps.boundary = Boundary::Open;
    } else if (boundary == "periodic") {
        out.mps.boundary = Boundary::Periodic;
    } else {
        throw_error(ErrorKind::Parse, "unknown boundary '" + boundary + "'");
    }
    if (!j.at("label_site").is_null()) {
        out.mps.label_site = j.at("label_site").get<std::size_t>();
    }
    for (const auto& s : j.at("sites")) {
        SiteTensor site;
        site.left_bond = s.at("left_bond").get<std::size_t>();
        site.phys_dim = s.at("phys_dim").get<std::size_t>();
        site.right_bond = s.at("right_bond").get<std::size_t>();
        site.label_dim = s.at("label_dim").get<std::size_t>();
        site.data = s.at("data").get<std::vector<double>>();
        out.mps.sites.push_back(std::move(site));
    }
    for (const auto& m : j.at("feature_maps")) {
        out.fms.push_back(feature_map_from_json(m));
    }
    out.mps.validate();
    if (out.fms.size() != out.mps.size()) {
        throw_error(ErrorKind::Parse, "feature map count does not match sites");
    }
    return out;
}

json sigma_to_json(const ScaleInvariantSigmoid& s) {
    json j;
    j["form"] = s.form_name();
    j["C"] = s.c();
    j["orientation"] =
        s.orientation() == Orientation::Increasing ? "increasing" : "decreasing";
    return j;
}

ScaleInvariantSigmoid sigma_from_json(const json& j) {
    const std::string form = j.at("form").get<std::string>();
    const double c = j.at("C").get<double>();
    if (form != "reciprocal_shift" && form != "scaled_logistic") {
        throw_error(ErrorKind::Parse, "unknown sigmoid form '" + form + "'");
    }
    const ScaleInvariantSigmoid sigma =
        form == "reciprocal_shift" ? ScaleInvariantSigmoid::reciprocal_shift(c)
                                   : ScaleInvariantSigmoid::scaled_logistic(c);
    const std::string orient = j.value("orientation", "");
    if (!orient.empty()) {
        const Orientation declared = orient == "increasing"
                                         ? Orientation::Increasing
                                         : Orientation::Decreasing;
        if (declared != sigma.orientation()) {
            throw_error(ErrorKind::Parse,
                        "declared orientation is inconsistent with the form");
        }
    }
    return sigma;
}

json parse_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) {
        throw_error(ErrorKind::Parse, "malformed JSON document");
    }
    return j;
}

}  // namespace

std::string save_mps(const Mps& mps, const std::vector<FeatureMap>& fms) {
    mps.validate();
    if (fms.size() != mps.size()) {
        throw_error(ErrorKind::Shape, "feature map count does not match sites");
    }
    return mps_to_json(mps, fms).dump(2) + "\n";
}

LoadedMps load_mps(const std::string& text) {
    return mps_from_json(parse_json(text));
}

std::string save_activated(const ActivatedMps& a) {
    a.validate();
    json j;
    j["format"] = "mpskit-activated";
    j["version"] = 1;
    j["core"] = mps_to_json(a.core, a.fms);
    j["core"]["format"] = "mpskit-mps";
    j["sigma"] = sigma_to_json(a.sigma);
    j["out_weights"] = a.out_weights;
    return j.dump(2) + "\n";
}

ActivatedMps load_activated(const std::string& text) {
    const json j = parse_json(text);
    if (j.value("format", "") != "mpskit-activated") {
        throw_error(ErrorKind::Parse, "not an mpskit-activated document");
    }
    if (j.value("version", 0) != 1) {
        throw_error(ErrorKind::Parse, "unsupported mpskit-activated version");
    }
    LoadedMps core = mps_from_json(j.at("core"));
    ActivatedMps a{std::move(core.mps), std::move(core.fms),
                   sigma_from_json(j.at("sigma")),
                   j.at("out_weights").get<std::vector<double>>()};
    a.validate();
    return a;
}

ActivatedMps load_activated_or_wrap(const std::string& text,
                                    const ScaleInvariantSigmoid& fallback_sigma) {
    const json j = parse_json(text);
    const std::string format = j.value("format", "");
    if (format == "mpskit-activated") return load_activated(text);
    if (format == "mpskit-mps") {
        LoadedMps loaded = mps_from_json(j);
        const std::size_t d = loaded.mps.output_dim();
        return ActivatedMps::wrap(std::move(loaded.mps), std::move(loaded.fms),
                                  fallback_sigma,
                                  std::vector<double>(d, 1.0));
    }
    throw_error(ErrorKind::Parse, "unknown document format '" + format + "'");
}

std::string save_flat(const FlatNetwork& f, bool include_monomials) {
    f.validate();
    json j;
    j["format"] = "mpskit-flat";
    j["version"] = 1;
    j["label_dim"] = f.label_dim;
    j["flat_dim"] = f.flat_dim;
    j["site_dims"] = f.site_dims;
    j["weights"] = f.weights;
    json kernel = json::array();
    for (std::size_t s = 0; s < f.flat_dim; ++s) {
        kernel.push_back(multi_index(f.site_dims, s));
    }
    j["kernel"] = std::move(kernel);
    json maps = json::array();
    for (const auto& fm : f.fms) maps.push_back(feature_map_to_json(fm));
    j["feature_maps"] = std::move(maps);
    if (f.sigma) {
        j["sigma"] = sigma_to_json(*f.sigma);
        j["out_weights"] = f.out_weights;
    }
    if (include_monomials) j["monomials"] = named_kernel(f);
    return j.dump(2) + "\n";
}

std::string save_table(const TruthTable& t) {
    t.validate();
    std::ostringstream out;
    out << "n=" << t.arity << "\n";
    for (std::uint32_t row = 0; row < t.rows(); ++row) {
        for (std::size_t i = 1; i <= t.arity; ++i) {
            out << TruthTable::bit_of(row, i, t.arity);
        }
        out << ' ' << (t.at(row) ? 1 : 0) << "\n";
    }
    return out.str();
}

TruthTable load_table(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;

    auto fail = [&](const std::string& msg) {
        throw_error(ErrorKind::Parse,
                    "table line " + std::to_string(lineno) + ": " + msg);
    };

    std::size_t arity = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("n=", 0) != 0) fail("expected header 'n=<arity>'");
        try {
            arity = std::stoul(line.substr(2));
        } catch (const std::exception&) {
            fail("bad arity");
        }
        break;
    }
    if (arity == 0 || arity > TruthTable::kMaxArity) {
        throw_error(ErrorKind::Parse, "table arity must be in 1.." +
                                          std::to_string(TruthTable::kMaxArity));
    }
    TruthTable t = TruthTable::zeros(arity);
    std::vector<bool> seen(t.rows(), false);
    std::size_t filled = 0;

    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("hex=", 0) == 0) {
            const std::string hex = line.substr(4);
            const std::size_t digits = (t.rows() + 3) / 4;
            if (hex.size() != digits) fail("hex string must have " +
                                           std::to_string(digits) + " digits");
            for (std::uint32_t row = 0; row < t.rows(); ++row) {
                const char c = hex[row / 4];
                int v;
                if (c >= '0' && c <= '9') {
                    v = c - '0';
                } else if (c >= 'a' && c <= 'f') {
                    v = c - 'a' + 10;
                } else if (c >= 'A' && c <= 'F') {
                    v = c - 'A' + 10;
                } else {
                    fail("bad hex digit");
                    v = 0;
                }
                t.outputs[row] = ((v >> (3 - row % 4)) & 1) != 0;
            }
            return t;
        }
        std::istringstream ls(line);
        std::string bits;
        int value = -1;
        ls >> bits >> value;
        if (bits.size() != arity || (value != 0 && value != 1)) {
            fail("expected '<bits> <0|1>' with " + std::to_string(arity) + " bits");
        }
        std::uint32_t row = 0;
        for (char c : bits) {
            if (c != '0' && c != '1') fail("bits must be 0/1");
            row = (row << 1) | static_cast<std::uint32_t>(c - '0');
        }
        if (seen[row]) fail("duplicate row");
        seen[row] = true;
        ++filled;
        t.outputs[row] = value == 1;
    }
    if (filled != t.rows()) {
        throw_error(ErrorKind::Parse,
                    "table lists " + std::to_string(filled) + " of " +
                        std::to_string(t.rows()) + " rows");
    }
    return t;
}

std::map<std::string, std::string> parse_config(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw_error(ErrorKind::Parse, "config line " + std::to_string(lineno) +
                                              ": expected key=value");
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw_error(ErrorKind::Parse, "config line " + std::to_string(lineno) +
                                              ": empty key");
        }
        out[key] = value;
    }
    return out;
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : value) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw_error(ErrorKind::InvalidArgument, "cannot open '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw_error(ErrorKind::InvalidArgument, "cannot write '" + path + "'");
    }
    out << content;
}

}  // namespace mpskit
