#include "spectral/pipeline.hpp"

#include <chrono>

namespace spectral {

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

BinaryMask nonzero(const GrayImage16& image) {
    BinaryMask m(image.width(), image.height());
    for (std::size_t i = 0; i < image.size(); ++i) m[i] = image[i] != 0 ? 1 : 0;
    return m;
}

int window_from(const Json& v) {
    if (!v.is_number_integer()) throw InvalidInput("'smooth_window' must be an integer");
    const long long w = v.get<long long>();
    if (w < 1 || w > 65535) throw InvalidInput("'smooth_window' out of range");
    return static_cast<int>(w);
}

std::size_t min_area_from(const Json& v) {
    if (!v.is_number_integer() || v.get<long long>() < 0) throw InvalidInput("'min_area' must be a non-negative integer");
    return v.get<std::size_t>();
}

std::uint16_t level_from(const Json& v, const char* key) {
    if (!v.is_number_integer() || v.get<long long>() < 0 || v.get<long long>() > 65535) {
        throw InvalidInput(std::string("'") + key + "' must be an integer in [0, 65535]");
    }
    return v.get<std::uint16_t>();
}

bool flag_from(const Json& v) {
    if (!v.is_boolean()) throw InvalidInput("'pre_done' must be a boolean");
    return v.get<bool>();
}

}  // namespace

Mode parse_mode(std::string_view name) {
    if (name == "tissue") return Mode::Tissue;
    if (name == "lesion") return Mode::Lesion;
    throw InvalidInput("unknown mode '" + std::string(name) + "' (expected tissue or lesion)");
}

std::string_view mode_name(Mode mode) { return mode == Mode::Tissue ? "tissue" : "lesion"; }

void RunConfig::validate() const {
    if (smooth_window < 1 || smooth_window % 2 == 0) throw InvalidInput("smoothing window must be an odd integer >= 1");
    if (bounds) {
        if (mode == Mode::Lesion) throw InvalidInput("loft bounds apply to tissue mode only");
        bounds->validate();
    }
    if (!pre_done) {
        preprocess.ghost.validate();
        DiffusionParams{1.0, preprocess.lambda, preprocess.iterations}.validate();
        if (preprocess.speckle_window < 3 || preprocess.speckle_window % 2 == 0) {
            throw InvalidInput("speckle window must be an odd integer >= 3");
        }
    }
}

LoftBounds RunConfig::effective_bounds() const { return bounds.value_or(default_bounds()); }

RunResult run_segmentation(const GrayImage16& image, const RunConfig& config) {
    config.validate();
    RunResult r;
    r.mode = config.mode;

    const auto t0 = std::chrono::steady_clock::now();
    if (config.pre_done) {
        r.preprocessed = image;
        r.body = nonzero(image);
        if (count_set(r.body) == 0) throw NoForeground();
    } else {
        PreprocessResult pre = preprocess_pipeline(image, config.preprocess);
        r.preprocessed = std::move(pre.image);
        r.body = std::move(pre.body);
    }
    r.preprocess_ms = ms_since(t0);

    const auto t1 = std::chrono::steady_clock::now();
    if (config.mode == Mode::Tissue) {
        TissueSegmentation s = segment_tissue(r.preprocessed, r.body, config.effective_bounds(), config.smooth_window);
        r.mask = std::move(s.mask);
        r.threshold = std::move(s.threshold);
        r.histogram = std::move(s.histogram);
    } else {
        LesionSegmentation s = segment_lesion(r.preprocessed, r.body, config.smooth_window, config.min_area);
        r.mask = std::move(s.mask);
        r.threshold = std::move(s.threshold);
        r.histogram = std::move(s.histogram);
        r.lesions = std::move(s.report);
    }
    r.segment_ms = ms_since(t1);
    return r;
}

Json params_to_json(const RunConfig& config, std::size_t image_width) {
    Json j{{"schema", "spectral.params/1"},
           {"mode", mode_name(config.mode)},
           {"pre_done", config.pre_done},
           {"smooth_window", config.smooth_window}};
    if (config.mode == Mode::Tissue) j["bounds"] = to_json(config.effective_bounds());
    else j["min_area"] = config.min_area;
    j["preprocess"] = to_json(config.preprocess, image_width);
    return j;
}

RunConfig params_from_json(const Json& j) {
    if (!j.is_object()) throw InvalidInput("parameter file must hold a JSON object");
    RunConfig c;
    for (const auto& item : j.items()) {
        const std::string& key = item.key();
        const Json& v = item.value();
        if (key == "schema") {
            if (v != "spectral.params/1") throw InvalidInput("unsupported parameter schema " + v.dump());
        } else if (key == "mode") {
            if (!v.is_string()) throw InvalidInput("'mode' must be a string");
            c.mode = parse_mode(v.get<std::string>());
        } else if (key == "pre_done") {
            c.pre_done = flag_from(v);
        } else if (key == "smooth_window") {
            c.smooth_window = window_from(v);
        } else if (key == "min_area") {
            c.min_area = min_area_from(v);
        } else if (key == "bounds") {
            if (!v.is_object() || !v.contains("lo") || !v.contains("hi") || v.size() != 2) {
                throw InvalidInput("'bounds' must be {\"lo\": int, \"hi\": int}");
            }
            c.bounds = LoftBounds{level_from(v.at("lo"), "lo"), level_from(v.at("hi"), "hi")};
        } else if (key == "preprocess") {
            c.preprocess = preprocess_params_from_json(v);
        } else if (key == "input" || key == "truth" || key == "output_format") {
            // run bookkeeping written by the command line; not a parameter
        } else {
            throw InvalidInput("unknown parameter key '" + key + "'");
        }
    }
    c.validate();
    return c;
}

RunConfig apply_overrides(RunConfig c, const Json& overrides) {
    if (overrides.is_null()) return c;
    if (!overrides.is_object()) throw InvalidInput("'params' must be a JSON object");
    Json pre = Json::object();
    std::optional<std::uint16_t> lo;
    std::optional<std::uint16_t> hi;
    for (const auto& item : overrides.items()) {
        const std::string& key = item.key();
        const Json& v = item.value();
        if (key == "lo") lo = level_from(v, "lo");
        else if (key == "hi") hi = level_from(v, "hi");
        else if (key == "smooth_window") c.smooth_window = window_from(v);
        else if (key == "min_area") c.min_area = min_area_from(v);
        else if (key == "pre_done") c.pre_done = flag_from(v);
        else pre[key] = v;
    }
    c.preprocess = preprocess_params_from_json(pre, c.preprocess);
    if (lo || hi) {
        const LoftBounds base = c.effective_bounds();
        c.bounds = LoftBounds{lo.value_or(base.lo), hi.value_or(base.hi)};
    }
    c.validate();
    return c;
}

}  // namespace spectral
