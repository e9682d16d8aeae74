#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

#include <CLI11.hpp>

#include "spectral/phantom.hpp"

namespace spectral::cli {

namespace fs = std::filesystem;

namespace {

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
}

PreprocessParams apply_flags(PreprocessParams p, const PreprocessFlags& f) {
    if (f.iterations) p.iterations = *f.iterations;
    if (f.lambda) p.lambda = *f.lambda;
    if (f.se_radius) p.ghost.se = StructuringElement(p.ghost.se.shape, *f.se_radius);
    if (f.se_shape) p.ghost.se = StructuringElement(parse_se_shape(*f.se_shape), p.ghost.se.radius);
    if (f.binarize_threshold) {
        if (*f.binarize_threshold < 0 || *f.binarize_threshold > 65535) {
            throw InvalidInput("--binarize-threshold must lie in [0, 65535]");
        }
        p.ghost.binarize_threshold = static_cast<std::uint16_t>(*f.binarize_threshold);
    }
    if (f.gain_sigma) p.bias.gain_sigma = *f.gain_sigma;
    if (f.final_sigma) p.bias.final_sigma = *f.final_sigma;
    return p;
}

std::uint16_t level(int v, const char* flag) {
    if (v < 0 || v > 65535) throw InvalidInput(std::string(flag) + " must lie in [0, 65535]");
    return static_cast<std::uint16_t>(v);
}

// The recorded input path is absolute so a parameter file can be replayed
// from any working directory.
std::string recorded_path(const fs::path& p) { return fs::absolute(p).lexically_normal().string(); }

std::optional<fs::path> path_field(const Json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    if (!j.at(key).is_string()) throw InvalidInput(std::string("'") + key + "' must be a path string");
    return fs::path(j.at(key).get<std::string>());
}

long long elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::llround(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const NoLoftFound& e) {
        err << "error: " << e.what() << "\n";
        return kExitNoLoft;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
}

}  // namespace

GrayImage16 load_image(const fs::path& path) {
    const auto bytes = read_file(path);
    const auto format = detect_format(bytes);
    if (!format) throw InvalidInput(path.string() + ": not a PGM (P5) or PNG file");
    return decode_image(bytes, *format);
}

int cmd_segment(const SegmentArgs& a, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto t0 = std::chrono::steady_clock::now();

        RunConfig cfg;
        Json file = Json::object();
        if (a.params_file) {
            file = read_json_file(*a.params_file);
            cfg = params_from_json(file);
        }
        if (a.mode) {
            const Mode m = parse_mode(*a.mode);
            if (m != cfg.mode) {
                // bounds and min_area from a file written for the other mode do not carry over
                cfg.bounds.reset();
                cfg.min_area = RunConfig{}.min_area;
            }
            cfg.mode = m;
        }
        if (cfg.mode == Mode::Lesion) cfg.bounds.reset();
        if (a.pre_done) cfg.pre_done = *a.pre_done;
        if (a.lo || a.hi) {
            const LoftBounds base = cfg.effective_bounds();
            cfg.bounds = LoftBounds{a.lo ? level(*a.lo, "--lo") : base.lo, a.hi ? level(*a.hi, "--hi") : base.hi};
        }
        if (a.smooth_window) cfg.smooth_window = *a.smooth_window;
        if (a.min_area) {
            if (*a.min_area < 0) throw InvalidInput("--min-area must be >= 0");
            cfg.min_area = static_cast<std::size_t>(*a.min_area);
        }
        cfg.preprocess = apply_flags(cfg.preprocess, a.preprocess);
        cfg.validate();

        std::optional<fs::path> input = a.input ? a.input : path_field(file, "input");
        if (!input) throw InvalidInput("no input image (use --in)");
        std::optional<fs::path> truth = a.truth ? a.truth : path_field(file, "truth");
        ImageFormat fmt = ImageFormat::Pgm16;
        if (a.format) fmt = parse_format(*a.format);
        else if (file.contains("output_format")) fmt = parse_format(file.at("output_format").get<std::string>());

        const GrayImage16 image = load_image(*input);
        std::optional<BinaryMask> truth_mask;
        if (truth) truth_mask = gray_to_mask(load_image(*truth));

        ensure_dir(a.out_dir);
        Json params = params_to_json(cfg, image.width());
        params["input"] = recorded_path(*input);
        params["truth"] = truth ? Json(recorded_path(*truth)) : Json(nullptr);
        params["output_format"] = format_name(fmt);
        write_json_file(a.out_dir / "params.json", params);

        RunResult r;
        try {
            r = run_segmentation(image, cfg);
        } catch (const NoLoftFound& e) {
            if (e.histogram()) write_text_file(a.out_dir / "histogram.csv", histogram_csv(*e.histogram()));
            throw;
        }

        const std::string ext = fmt == ImageFormat::Pgm16 ? "pgm" : "png";
        write_image(r.mask, a.out_dir / ("mask." + ext), fmt);
        Json thr = to_json(r.threshold);
        thr["mode"] = mode_name(r.mode);
        write_json_file(a.out_dir / "threshold.json", thr);
        write_text_file(a.out_dir / "histogram.csv", histogram_csv(r.histogram));
        if (r.lesions) write_json_file(a.out_dir / "lesions.json", to_json(*r.lesions));

        out << "threshold: " << r.threshold.threshold << "\n";
        if (r.lesions) out << "components: " << r.lesions->components.size() << "\n";
        if (truth_mask) {
            const MetricsReport m = evaluate(r.mask, *truth_mask);
            write_json_file(a.out_dir / "metrics.json", to_json(m));
            out << "dsc: " << m.dsc << "\nji: " << m.ji << "\n";
        }
        out << "segment_ms: " << std::llround(r.segment_ms) << "\n";
        out << "total_ms: " << elapsed_ms(t0) << "\n";
        return kExitOk;
    });
}

int cmd_preprocess(const PreprocessArgs& a, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto t0 = std::chrono::steady_clock::now();
        PreprocessParams p;
        Json file = Json::object();
        if (a.params_file) {
            file = read_json_file(*a.params_file);
            p = params_from_json(file).preprocess;
        }
        p = apply_flags(p, a.preprocess);
        std::optional<fs::path> input = a.input ? a.input : path_field(file, "input");
        if (!input) throw InvalidInput("no input image (use --in)");

        const GrayImage16 image = load_image(*input);
        ensure_dir(a.out_dir);
        Json params{{"schema", "spectral.params/1"},
                    {"preprocess", to_json(p, image.width())},
                    {"input", recorded_path(*input)}};
        write_json_file(a.out_dir / "params.json", params);

        const PreprocessResult r = preprocess_pipeline(image, p);
        write_image(r.image, a.out_dir / "preprocessed.pgm", ImageFormat::Pgm16);
        write_image(r.body, a.out_dir / "body.pgm", ImageFormat::Pgm16);
        write_json_file(a.out_dir / "preprocess.json", Json{{"k", r.k},
                                                            {"speckle_before", r.speckle_before},
                                                            {"speckle_after_diffusion", r.speckle_after_diffusion},
                                                            {"speckle_after", r.speckle_after},
                                                            {"body_pixels", count_set(r.body)}});
        out << "k: " << r.k << "\n";
        out << "speckle_before: " << r.speckle_before << "\nspeckle_after: " << r.speckle_after << "\n";
        out << "total_ms: " << elapsed_ms(t0) << "\n";
        return kExitOk;
    });
}

int cmd_metrics(const MetricsArgs& a, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const BinaryMask pred = gray_to_mask(load_image(a.pred));
        const BinaryMask truth = gray_to_mask(load_image(a.truth));
        const MetricsReport m = evaluate(pred, truth);
        const Json j = to_json(m);
        if (a.out) write_json_file(*a.out, j);
        out << j.dump(2) << "\n";
        return kExitOk;
    });
}

int cmd_phantom(const PhantomArgs& a, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const PhantomSpec spec = phantom_spec_from_json(read_json_file(a.spec));
        const Phantom ph = generate(spec);
        write_phantom_set(ph, spec, a.out_dir);
        out << "wrote " << (a.out_dir / "image.pgm").string() << " (" << ph.image.width() << "x" << ph.image.height()
            << ", seed " << *spec.seed << ")\n";
        return kExitOk;
    });
}

namespace {

void add_preprocess_flags(CLI::App* app, PreprocessFlags& f) {
    app->add_option("--iterations", f.iterations, "Diffusion iterations (default 15)");
    app->add_option("--lambda", f.lambda, "Diffusion step weight in (0, 0.25] (default 0.25)");
    app->add_option("--se-radius", f.se_radius, "Ghost-removal structuring element radius (default 3)");
    app->add_option("--se-shape", f.se_shape, "Structuring element shape: disk, square or cross");
    app->add_option("--binarize-threshold", f.binarize_threshold, "Foreground threshold for ghost removal (default 100)");
    app->add_option("--gain-sigma", f.gain_sigma, "Bias-field smoothing sigma in pixels (default width/8)");
    app->add_option("--final-sigma", f.final_sigma, "Closing smoothing sigma in pixels (default 0, off)");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spectral-loft segmentation of 16-bit greyscale images", "spectral"};
    app.set_version_flag("--version", SPECTRAL_VERSION);
    app.require_subcommand(1);

    SegmentArgs seg;
    auto* s = app.add_subcommand("segment", "Preprocess and segment one image");
    s->add_option("--in", seg.input, "Input image (PGM or PNG, 16-bit)");
    s->add_option("--out", seg.out_dir, "Output directory")->required();
    s->add_option("--params", seg.params_file, "Replay a params.json from an earlier run");
    s->add_option("--mode", seg.mode, "tissue or lesion (default tissue)");
    s->add_option("--truth", seg.truth, "Ground-truth mask; writes metrics.json");
    s->add_flag("--pre-done", seg.pre_done, "Input is already preprocessed (accepts =true/=false)");
    s->add_option("--lo", seg.lo, "Lower loft bound (tissue mode, default 300)");
    s->add_option("--hi", seg.hi, "Upper loft bound (tissue mode, default 800)");
    s->add_option("--smooth-window", seg.smooth_window, "Histogram moving-average window (default 5)");
    s->add_option("--min-area", seg.min_area, "Smallest lesion component kept (default 10)");
    s->add_option("--format", seg.format, "Mask format: pgm or png (default pgm)");
    add_preprocess_flags(s, seg.preprocess);

    PreprocessArgs pre;
    auto* p = app.add_subcommand("preprocess", "Run only the preprocessing chain");
    p->add_option("--in", pre.input, "Input image (PGM or PNG, 16-bit)");
    p->add_option("--out", pre.out_dir, "Output directory")->required();
    p->add_option("--params", pre.params_file, "Take preprocessing parameters from a params.json");
    add_preprocess_flags(p, pre.preprocess);

    MetricsArgs met;
    auto* m = app.add_subcommand("metrics", "Compare a predicted mask with ground truth");
    m->add_option("pred", met.pred, "Predicted mask")->required();
    m->add_option("truth", met.truth, "Ground-truth mask")->required();
    m->add_option("--out", met.out, "Write the report to this JSON file");

    PhantomArgs ph;
    auto* g = app.add_subcommand("phantom", "Generate a synthetic phantom set from a JSON spec");
    g->add_option("spec", ph.spec, "Phantom spec JSON (must contain a seed)")->required();
    g->add_option("--out", ph.out_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitError;
    }

    if (s->parsed()) return cmd_segment(seg, out, err);
    if (p->parsed()) return cmd_preprocess(pre, out, err);
    if (m->parsed()) return cmd_metrics(met, out, err);
    return cmd_phantom(ph, out, err);
}

}  // namespace spectral::cli
