#include "spectral/serialize.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "spectral/image_io.hpp"

namespace spectral {

namespace {

void reject_unknown_keys(const Json& j, std::initializer_list<std::string_view> known, std::string_view what) {
    if (!j.is_object()) throw InvalidInput(std::string(what) + " must be a JSON object");
    for (const auto& item : j.items()) {
        if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
            throw InvalidInput("unknown " + std::string(what) + " key '" + item.key() + "'");
        }
    }
}

template <typename T>
T get_as(const Json& j, std::string_view key) {
    try {
        return j.at(std::string(key)).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw InvalidInput("bad value for '" + std::string(key) + "'");
    }
}

// Accepts only integral JSON numbers in [lo, hi].
template <typename T>
T get_int(const Json& j, std::string_view key, long long lo, long long hi) {
    const Json& v = j.at(std::string(key));
    if (!v.is_number_integer()) throw InvalidInput("'" + std::string(key) + "' must be an integer");
    const long long x = v.get<long long>();
    if (x < lo || x > hi) throw InvalidInput("'" + std::string(key) + "' out of range");
    return static_cast<T>(x);
}

double get_real(const Json& j, std::string_view key) {
    const Json& v = j.at(std::string(key));
    if (!v.is_number()) throw InvalidInput("'" + std::string(key) + "' must be a number");
    return v.get<double>();
}

}  // namespace

Json to_json(const LoftBounds& b) { return Json{{"lo", b.lo}, {"hi", b.hi}}; }

Json to_json(const ThresholdResult& t) {
    Json cands = Json::array();
    for (const auto& c : t.candidates) cands.push_back({{"intensity", c.intensity}, {"count", c.count}});
    return Json{{"threshold", t.threshold},
                {"bounds", to_json(t.bounds)},
                {"smoothing_window", t.smoothing_window},
                {"candidates", std::move(cands)}};
}

Json to_json(const Component& c) {
    return Json{{"label", c.label},
                {"pixel_count", c.pixel_count},
                {"bbox", {{"x0", c.bbox.x0}, {"y0", c.bbox.y0}, {"x1", c.bbox.x1}, {"y1", c.bbox.y1}}},
                {"centroid_x", c.centroid_x},
                {"centroid_y", c.centroid_y}};
}

Json to_json(const LesionReport& r) {
    Json comps = Json::array();
    for (const auto& c : r.components) comps.push_back(to_json(c));
    return Json{{"threshold", r.threshold}, {"min_area_applied", r.min_area_applied}, {"components", std::move(comps)}};
}

Json to_json(const MetricsReport& m) {
    return Json{{"dsc", m.dsc},
                {"ji", m.ji},
                {"tp", m.counts.tp},
                {"fp", m.counts.fp},
                {"fn", m.counts.fn},
                {"tn", m.counts.tn}};
}

Json to_json(const PreprocessParams& p, std::size_t image_width) {
    return Json{{"binarize_threshold", p.ghost.binarize_threshold},
                {"se_shape", se_shape_name(p.ghost.se.shape)},
                {"se_radius", p.ghost.se.radius},
                {"lambda", p.lambda},
                {"iterations", p.iterations},
                {"gain_sigma", p.bias.effective_gain_sigma(image_width)},
                {"final_sigma", p.bias.final_sigma},
                {"epsilon", p.bias.epsilon},
                {"speckle_window", p.speckle_window}};
}

PreprocessParams preprocess_params_from_json(const Json& j, PreprocessParams p) {
    reject_unknown_keys(j,
                        {"binarize_threshold", "se_shape", "se_radius", "lambda", "iterations", "gain_sigma",
                         "final_sigma", "epsilon", "speckle_window"},
                        "preprocess parameter");
    if (j.contains("binarize_threshold")) {
        p.ghost.binarize_threshold = get_int<std::uint16_t>(j, "binarize_threshold", 0, 65535);
    }
    if (j.contains("se_shape")) p.ghost.se.shape = parse_se_shape(get_as<std::string>(j, "se_shape"));
    if (j.contains("se_radius")) p.ghost.se.radius = get_int<int>(j, "se_radius", 1, 1 << 16);
    if (j.contains("lambda")) p.lambda = get_real(j, "lambda");
    if (j.contains("iterations")) p.iterations = get_int<int>(j, "iterations", 0, 1 << 20);
    if (j.contains("gain_sigma")) {
        if (j.at("gain_sigma").is_null()) p.bias.gain_sigma.reset();
        else p.bias.gain_sigma = get_real(j, "gain_sigma");
    }
    if (j.contains("final_sigma")) p.bias.final_sigma = get_real(j, "final_sigma");
    if (j.contains("epsilon")) p.bias.epsilon = get_real(j, "epsilon");
    if (j.contains("speckle_window")) p.speckle_window = get_int<int>(j, "speckle_window", 1, 1 << 16);
    return p;
}

std::string histogram_csv(const IntensityHistogram& h) {
    std::string out = "intensity,count\n";
    const auto top = h.max_intensity();
    if (!top) return out;
    out.reserve(out.size() + (*top + 1u) * 8u);
    for (std::size_t v = 0; v <= *top; ++v) {
        out += std::to_string(v);
        out += ',';
        out += std::to_string(h[v]);
        out += '\n';
    }
    return out;
}

std::string metrics_csv(const MetricsReport& m) {
    std::ostringstream os;
    os.precision(17);
    os << "dsc,ji,tp,fp,fn,tn\n"
       << m.dsc << ',' << m.ji << ',' << m.counts.tp << ',' << m.counts.fp << ',' << m.counts.fn << ','
       << m.counts.tn << '\n';
    return os.str();
}

Json downsample_histogram(const IntensityHistogram& h, std::optional<std::uint16_t> threshold,
                          std::size_t max_points) {
    if (max_points < 3) throw InvalidInput("histogram downsampling needs at least 3 points");
    const std::size_t top = std::max<std::size_t>(h.max_intensity().value_or(0), threshold.value_or(0));
    const std::size_t bins = top + 1;

    // Equal-width buckets; the one holding the threshold is cut into up to
    // three pieces so the threshold bin stands alone. Two points are kept in
    // reserve for that split.
    std::vector<std::pair<std::size_t, std::size_t>> ranges;  // [lo, hi] inclusive
    const std::size_t n = std::min(bins, max_points - 2);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i * bins / n;
        const std::size_t hi = (i + 1) * bins / n - 1;
        if (threshold && lo <= *threshold && *threshold <= hi) {
            const std::size_t t = *threshold;
            if (lo < t) ranges.emplace_back(lo, t - 1);
            ranges.emplace_back(t, t);
            if (t < hi) ranges.emplace_back(t + 1, hi);
        } else {
            ranges.emplace_back(lo, hi);
        }
    }

    Json lo = Json::array();
    Json hi = Json::array();
    Json count = Json::array();
    for (const auto& [a, b] : ranges) {
        std::uint64_t m = 0;
        for (std::size_t v = a; v <= b; ++v) m = std::max(m, h[v]);
        lo.push_back(a);
        hi.push_back(b);
        count.push_back(m);
    }
    return Json{{"bucket_lo", std::move(lo)}, {"bucket_hi", std::move(hi)}, {"max_count", std::move(count)}};
}

Json to_json(const PhantomSpec& spec) {
    const auto cls = [](const ClassSpec& c) {
        return Json{{"mean", c.mean}, {"sigma", c.sigma}, {"distribution", distribution_name(c.distribution)}};
    };
    const EllipseSpec e = spec.effective_body();
    Json lesions = Json::array();
    for (const auto& l : spec.lesions) {
        lesions.push_back({{"cx", l.cx}, {"cy", l.cy}, {"area", l.area}, {"intensity", l.intensity}});
    }
    Json j{{"width", spec.width},
           {"height", spec.height},
           {"body", {{"cx", e.cx}, {"cy", e.cy}, {"rx", e.rx}, {"ry", e.ry}}},
           {"dark", cls(spec.dark)},
           {"bright", cls(spec.bright)},
           {"layout", layout_name(spec.layout)},
           {"cell_size", spec.cell_size},
           {"texture_sigma", spec.texture_sigma},
           {"lesions", std::move(lesions)},
           {"noise", spec.noise},
           {"gain_min", spec.gain_min},
           {"gain_max", spec.gain_max},
           {"ghost_specks", spec.ghost_specks},
           {"ghost_intensity", spec.ghost_intensity}};
    if (spec.seed) j["seed"] = *spec.seed;
    else j["seed"] = nullptr;
    return j;
}

PhantomSpec phantom_spec_from_json(const Json& j) {
    reject_unknown_keys(j,
                        {"width", "height", "body", "dark", "bright", "layout", "cell_size", "texture_sigma",
                         "lesions", "noise", "gain_min", "gain_max", "ghost_specks", "ghost_intensity", "seed"},
                        "phantom spec");
    PhantomSpec s;
    constexpr long long kBig = 1LL << 40;
    if (j.contains("width")) s.width = get_int<std::size_t>(j, "width", 1, kBig);
    if (j.contains("height")) s.height = get_int<std::size_t>(j, "height", 1, kBig);
    if (j.contains("body") && !j.at("body").is_null()) {
        const Json& b = j.at("body");
        reject_unknown_keys(b, {"cx", "cy", "rx", "ry"}, "body");
        s.body = EllipseSpec{get_real(b, "cx"), get_real(b, "cy"), get_real(b, "rx"), get_real(b, "ry")};
    }
    const auto read_class = [](const Json& c, ClassSpec base) {
        reject_unknown_keys(c, {"mean", "sigma", "distribution"}, "class");
        if (c.contains("mean")) base.mean = get_real(c, "mean");
        if (c.contains("sigma")) base.sigma = get_real(c, "sigma");
        if (c.contains("distribution")) base.distribution = parse_distribution(get_as<std::string>(c, "distribution"));
        return base;
    };
    if (j.contains("dark")) s.dark = read_class(j.at("dark"), s.dark);
    if (j.contains("bright")) s.bright = read_class(j.at("bright"), s.bright);
    if (j.contains("layout")) s.layout = parse_layout(get_as<std::string>(j, "layout"));
    if (j.contains("cell_size")) s.cell_size = get_int<std::size_t>(j, "cell_size", 0, kBig);
    if (j.contains("texture_sigma")) s.texture_sigma = get_real(j, "texture_sigma");
    if (j.contains("lesions")) {
        const Json& arr = j.at("lesions");
        if (!arr.is_array()) throw InvalidInput("'lesions' must be an array");
        for (const Json& l : arr) {
            reject_unknown_keys(l, {"cx", "cy", "area", "intensity"}, "lesion");
            s.lesions.push_back({get_real(l, "cx"), get_real(l, "cy"), get_int<std::size_t>(l, "area", 0, kBig),
                                 get_real(l, "intensity")});
        }
    }
    if (j.contains("noise")) s.noise = get_real(j, "noise");
    if (j.contains("gain_min")) s.gain_min = get_real(j, "gain_min");
    if (j.contains("gain_max")) s.gain_max = get_real(j, "gain_max");
    if (j.contains("ghost_specks")) s.ghost_specks = get_int<std::size_t>(j, "ghost_specks", 0, kBig);
    if (j.contains("ghost_intensity")) s.ghost_intensity = get_real(j, "ghost_intensity");
    if (!j.contains("seed") || j.at("seed").is_null()) {
        throw InvalidInput("phantom spec requires an explicit integer seed");
    }
    const Json& seed = j.at("seed");
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0)) {
        throw InvalidInput("'seed' must be a non-negative integer");
    }
    s.seed = seed.get<std::uint64_t>();
    s.validate();
    return s;
}

void write_phantom_set(const Phantom& phantom, const PhantomSpec& spec, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
    write_image(phantom.image, dir / "image.pgm", ImageFormat::Pgm16);
    write_image(phantom.body, dir / "body.pgm", ImageFormat::Pgm16);
    write_image(phantom.dark_class, dir / "dark_class.pgm", ImageFormat::Pgm16);
    write_image(phantom.lesions, dir / "lesions.pgm", ImageFormat::Pgm16);
    const Json manifest{{"schema", "spectral.phantom/1"},
                        {"spec", to_json(spec)},
                        {"files",
                         {{"image", "image.pgm"},
                          {"body", "body.pgm"},
                          {"dark_class", "dark_class.pgm"},
                          {"lesions", "lesions.pgm"}}},
                        {"counts",
                         {{"body", count_set(phantom.body)},
                          {"dark_class", count_set(phantom.dark_class)},
                          {"lesions", count_set(phantom.lesions)}}}};
    write_json_file(dir / "manifest.json", manifest);
}

Json read_json_file(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    try {
        return Json::parse(bytes.begin(), bytes.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidInput("malformed JSON in " + path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace spectral
