#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "spectral/image_io.hpp"
#include "spectral/morphology.hpp"
#include "spectral/phantom.hpp"
#include "spectral/pipeline.hpp"

namespace py = pybind11;
using namespace spectral;

namespace {

template <typename T>
Raster<T> from_array(const py::array_t<T, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2) throw InvalidInput("expected a 2-D array");
    const auto h = static_cast<std::size_t>(a.shape(0));
    const auto w = static_cast<std::size_t>(a.shape(1));
    return Raster<T>(w, h, std::vector<T>(a.data(), a.data() + a.size()));
}

BinaryMask mask_from_array(const py::array& a) {
    const auto b = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>::ensure(a.attr("astype")("bool"));
    return from_array<std::uint8_t>(b);
}

template <typename T>
py::array_t<T> to_array(const Raster<T>& r) {
    py::array_t<T> out({r.height(), r.width()});
    std::copy(r.vector().begin(), r.vector().end(), out.mutable_data());
    return out;
}

py::array_t<bool> mask_to_array(const BinaryMask& m) {
    py::array_t<bool> out({m.height(), m.width()});
    bool* p = out.mutable_data();
    for (std::size_t i = 0; i < m.size(); ++i) p[i] = m[i] != 0;
    return out;
}

Json parse_json(const std::string& text) {
    if (text.empty()) return Json::object();
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidInput(std::string("bad JSON: ") + e.what());
    }
}

py::object json_to_py(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

StructuringElement se_from(const std::string& shape, int radius) { return {parse_se_shape(shape), radius}; }

py::dict run_dict(const RunResult& r, const RunConfig& cfg) {
    py::dict d;
    d["mode"] = std::string(mode_name(r.mode));
    d["threshold"] = r.threshold.threshold;
    d["threshold_info"] = json_to_py(to_json(r.threshold));
    d["mask"] = mask_to_array(r.mask);
    d["preprocessed"] = to_array(r.preprocessed);
    d["body"] = mask_to_array(r.body);
    const auto top = r.histogram.max_intensity().value_or(0);
    py::array_t<std::uint64_t> hist(static_cast<py::ssize_t>(top) + 1);
    std::copy_n(r.histogram.counts().begin(), top + 1, hist.mutable_data());
    d["histogram"] = hist;
    if (r.lesions) d["lesions"] = json_to_py(to_json(*r.lesions));
    d["params"] = json_to_py(params_to_json(cfg, r.preprocessed.width()));
    return d;
}

}  // namespace

PYBIND11_MODULE(_spectral, m) {
    m.doc() = "Spectral-loft segmentation core";
    m.attr("__version__") = SPECTRAL_VERSION;

    py::register_exception<Error>(m, "SpectralError", PyExc_ValueError);
    // registered later, so tried first
    py::register_exception<NoLoftFound>(m, "NoLoftFound", m.attr("SpectralError").ptr());

    m.def(
        "read_image",
        [](const std::string& path) {
            const auto bytes = read_file(path);
            const auto fmt = detect_format(bytes);
            if (!fmt) throw InvalidInput(path + ": not a PGM or PNG file");
            return to_array(decode_image(bytes, *fmt));
        },
        py::arg("path"));
    m.def(
        "write_image",
        [](const py::array_t<std::uint16_t, py::array::c_style | py::array::forcecast>& a, const std::string& path,
           const std::string& format) { write_image(from_array<std::uint16_t>(a), path, parse_format(format)); },
        py::arg("image"), py::arg("path"), py::arg("format") = "pgm");

    m.def(
        "generate_phantom",
        [](const std::string& spec_json) {
            const PhantomSpec spec = phantom_spec_from_json(parse_json(spec_json));
            const Phantom p = generate(spec);
            py::dict d;
            d["image"] = to_array(p.image);
            d["body"] = mask_to_array(p.body);
            d["dark_class"] = mask_to_array(p.dark_class);
            d["lesions"] = mask_to_array(p.lesions);
            return d;
        },
        py::arg("spec_json"));

    m.def(
        "preprocess",
        [](const py::array_t<std::uint16_t, py::array::c_style | py::array::forcecast>& a,
           const std::string& params_json) {
            const PreprocessParams params = preprocess_params_from_json(parse_json(params_json));
            const GrayImage16 img = from_array<std::uint16_t>(a);
            PreprocessResult r;
            {
                py::gil_scoped_release release;
                r = preprocess_pipeline(img, params);
            }
            py::dict d;
            d["image"] = to_array(r.image);
            d["body"] = mask_to_array(r.body);
            d["k"] = r.k;
            d["speckle_before"] = r.speckle_before;
            d["speckle_after_diffusion"] = r.speckle_after_diffusion;
            d["speckle_after"] = r.speckle_after;
            return d;
        },
        py::arg("image"), py::arg("params_json") = "");

    m.def(
        "segment",
        [](const py::array_t<std::uint16_t, py::array::c_style | py::array::forcecast>& a, const std::string& mode,
           const std::string& params_json) {
            RunConfig cfg;
            cfg.mode = parse_mode(mode);
            cfg = apply_overrides(cfg, parse_json(params_json));
            const GrayImage16 img = from_array<std::uint16_t>(a);
            RunResult r;
            {
                py::gil_scoped_release release;
                r = run_segmentation(img, cfg);
            }
            return run_dict(r, cfg);
        },
        py::arg("image"), py::arg("mode") = "tissue", py::arg("params_json") = "");

    m.def(
        "find_loft",
        [](const py::array_t<std::uint64_t, py::array::c_style | py::array::forcecast>& counts, int lo, int hi,
           int window) {
            if (counts.ndim() != 1 || counts.size() > static_cast<py::ssize_t>(kHistogramBins)) {
                throw InvalidInput("histogram must be 1-D with at most 65536 bins");
            }
            std::vector<std::uint64_t> c(kHistogramBins, 0);
            std::copy_n(counts.data(), counts.size(), c.begin());
            if (lo < 0 || hi > 65535) throw InvalidInput("bounds must lie in [0, 65535]");
            const ThresholdResult t = find_loft(IntensityHistogram(std::move(c)),
                                                LoftBounds{static_cast<std::uint16_t>(lo), static_cast<std::uint16_t>(hi)},
                                                window);
            return json_to_py(to_json(t));
        },
        py::arg("counts"), py::arg("lo") = 300, py::arg("hi") = 800, py::arg("window") = 5);

    m.def(
        "evaluate",
        [](const py::array& pred, const py::array& truth) {
            return json_to_py(to_json(evaluate(mask_from_array(pred), mask_from_array(truth))));
        },
        py::arg("pred"), py::arg("truth"));

    m.def(
        "erode",
        [](const py::array& mask, const std::string& shape, int radius) {
            return mask_to_array(erode(mask_from_array(mask), se_from(shape, radius)));
        },
        py::arg("mask"), py::arg("shape") = "disk", py::arg("radius") = 3);
    m.def(
        "dilate",
        [](const py::array& mask, const std::string& shape, int radius) {
            return mask_to_array(dilate(mask_from_array(mask), se_from(shape, radius)));
        },
        py::arg("mask"), py::arg("shape") = "disk", py::arg("radius") = 3);
    m.def(
        "opening",
        [](const py::array& mask, const std::string& shape, int radius) {
            return mask_to_array(open(mask_from_array(mask), se_from(shape, radius)));
        },
        py::arg("mask"), py::arg("shape") = "disk", py::arg("radius") = 3);
}
