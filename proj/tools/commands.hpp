#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "spectral/pipeline.hpp"

namespace spectral::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNoLoft = 2;

/// Flag values as given on the command line; unset fields fall back to the
/// parameter file (if any) and then to the library defaults.
struct PreprocessFlags {
    std::optional<int> iterations;
    std::optional<double> lambda;
    std::optional<int> se_radius;
    std::optional<std::string> se_shape;
    std::optional<int> binarize_threshold;
    std::optional<double> gain_sigma;
    std::optional<double> final_sigma;
};

struct SegmentArgs {
    std::optional<std::filesystem::path> input;
    std::filesystem::path out_dir;
    std::optional<std::filesystem::path> params_file;
    std::optional<std::filesystem::path> truth;
    std::optional<std::string> mode;
    std::optional<bool> pre_done;
    std::optional<int> lo;
    std::optional<int> hi;
    std::optional<int> smooth_window;
    std::optional<long long> min_area;
    std::optional<std::string> format;
    PreprocessFlags preprocess;
};

struct PreprocessArgs {
    std::optional<std::filesystem::path> input;
    std::filesystem::path out_dir;
    std::optional<std::filesystem::path> params_file;
    PreprocessFlags preprocess;
};

struct MetricsArgs {
    std::filesystem::path pred;
    std::filesystem::path truth;
    std::optional<std::filesystem::path> out;
};

struct PhantomArgs {
    std::filesystem::path spec;
    std::filesystem::path out_dir;
};

/// Reads a PGM or PNG file, choosing the decoder from its magic bytes.
GrayImage16 load_image(const std::filesystem::path& path);

int cmd_segment(const SegmentArgs& args, std::ostream& out, std::ostream& err);
int cmd_preprocess(const PreprocessArgs& args, std::ostream& out, std::ostream& err);
int cmd_metrics(const MetricsArgs& args, std::ostream& out, std::ostream& err);
int cmd_phantom(const PhantomArgs& args, std::ostream& out, std::ostream& err);

/// Full command-line entry point (argv[0] included).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spectral::cli
