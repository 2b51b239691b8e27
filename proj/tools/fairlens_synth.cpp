// Writes a synthetic fixture set for trying the pipeline end to end:
//   landmarks.csv         face population (some turned sideways)
//   aus.csv               random action-unit frames
//   features.csv          per-instance features of the biased-label scenario
//   labels.csv            H (group-biased) plus GR, S, NC (group-independent)
//   groups.csv            sensitive attribute

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "fairlens.hpp"
#include "fairlens/synthetic.hpp"

namespace fl = fairlens;

int main(int argc, char** argv) {
    CLI::App app{"fairlens-synth: synthetic fixtures for the fairlens pipeline"};
    std::string dir = ".";
    std::size_t faces = 200, frames = 500, instances = 400;
    std::uint64_t seed = 7;
    double bias = 1.0;
    app.add_option("--out-dir", dir, "Output directory")->capture_default_str();
    app.add_option("--faces", faces, "Landmark faces")->capture_default_str();
    app.add_option("--frames", frames, "AU frames")->capture_default_str();
    app.add_option("--instances", instances, "Instances of the biased-label scenario")->capture_default_str();
    app.add_option("--seed", seed, "Random seed")->capture_default_str();
    app.add_option("--bias", bias, "Group shift applied to the H channel")->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    try {
        std::filesystem::create_directories(dir);
        auto path = [&](const char* name) { return (std::filesystem::path(dir) / name).string(); };

        fl::write_landmarks(path("landmarks.csv"), fl::synthetic::face_population(faces, seed));
        auto tax = fl::expression::default_taxonomy();
        fl::write_au_frames(path("aus.csv"), fl::synthetic::frame_population(frames, seed + 1, tax), tax.au_codes());

        auto d = fl::synthetic::biased_dataset(instances, seed + 2, bias);
        fl::write_table(path("features.csv"), fl::trainer::features_to_table(d.features));
        std::vector<fl::LabelChannel> labels{d.human};
        labels.insert(labels.end(), d.objective.begin(), d.objective.end());
        fl::write_label_channels(path("labels.csv"), labels);
        fl::write_label_channels(path("groups.csv"), {d.groups});
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return 0;
}
