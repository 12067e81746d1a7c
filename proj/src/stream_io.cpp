#include "vcad/stream_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "vcad/errors.hpp"

namespace vcad {

namespace {

using nlohmann::json;

[[noreturn]] void fail(std::size_t line, const std::string& field, const std::string& what) {
    throw ValidationError("line " + std::to_string(line) + ", field '" + field + "': " + what);
}

std::vector<double> read_vector(const json& j, std::size_t line, const std::string& field,
                                std::size_t expected) {
    if (!j.is_array()) {
        fail(line, field, "expected an array");
    }
    if (j.size() != expected) {
        fail(line, field,
             "expected " + std::to_string(expected) + " components, got " + std::to_string(j.size()));
    }
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) {
            fail(line, field + "[" + std::to_string(i) + "]", "expected a number");
        }
        const double v = j[i].get<double>();
        if (!std::isfinite(v)) {
            fail(line, field + "[" + std::to_string(i) + "]", "non-finite value");
        }
        out.push_back(v);
    }
    return out;
}

void check_face(const StreamFace& face, std::size_t line, const std::string& prefix) {
    const auto& obs = face.observation;
    if (!obs.box.valid()) {
        fail(line, prefix + ".box", "box must have non-negative coordinates and positive area");
    }
    if (obs.has_embedding() && obs.embedding.size() != kEmbeddingSize) {
        fail(line, prefix + ".embedding", "expected 128 components");
    }
    if (obs.has_expression()) {
        if (obs.expression.size() != kExpressionCount) {
            fail(line, prefix + ".expression",
                 "expected 7 components, got " + std::to_string(obs.expression.size()));
        }
        double sum = 0.0;
        for (const double v : obs.expression) {
            if (v < 0.0) {
                fail(line, prefix + ".expression", "components must be non-negative");
            }
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-6) {
            fail(line, prefix + ".expression", "components must sum to 1");
        }
    }
}

StreamFace parse_face(const json& j, std::size_t line, std::int64_t frame, const std::string& prefix) {
    if (!j.is_object()) {
        fail(line, prefix, "expected an object");
    }
    StreamFace face;
    face.observation.frame_index = frame;
    if (!j.contains("box")) {
        fail(line, prefix + ".box", "missing");
    }
    const auto box = read_vector(j.at("box"), line, prefix + ".box", 4);
    face.observation.box = {box[0], box[1], box[2], box[3]};
    if (const auto it = j.find("channel"); it != j.end()) {
        if (!it->is_string()) {
            fail(line, prefix + ".channel", "expected \"a\" or \"b\"");
        }
        const auto c = it->get<std::string>();
        if (c == "a") {
            face.channel = Channel::A;
        } else if (c == "b") {
            face.channel = Channel::B;
        } else {
            fail(line, prefix + ".channel", "expected \"a\" or \"b\", got \"" + c + "\"");
        }
    }
    if (const auto it = j.find("embedding"); it != j.end()) {
        face.observation.embedding = read_vector(*it, line, prefix + ".embedding", kEmbeddingSize);
    }
    if (const auto it = j.find("expression"); it != j.end()) {
        face.observation.expression = read_vector(*it, line, prefix + ".expression", kExpressionCount);
    }
    if (const auto it = j.find("label"); it != j.end()) {
        if (!it->is_string()) {
            fail(line, prefix + ".label", "expected a string");
        }
        const auto name = it->get<std::string>();
        face.observation.expression_label = parse_expression(name);
        if (!face.observation.expression_label) {
            fail(line, prefix + ".label", "unknown expression '" + name + "'");
        }
    }
    check_face(face, line, prefix);
    return face;
}

json face_to_json(const StreamFace& face) {
    const auto& obs = face.observation;
    json j;
    j["box"] = {obs.box.x_min, obs.box.y_min, obs.box.x_max, obs.box.y_max};
    if (face.channel != Channel::None) {
        j["channel"] = face.channel == Channel::A ? "a" : "b";
    }
    if (obs.has_embedding()) {
        j["embedding"] = obs.embedding;
    }
    if (obs.has_expression()) {
        j["expression"] = obs.expression;
    }
    if (obs.expression_label) {
        j["label"] = std::string(to_string(*obs.expression_label));
    }
    return j;
}

double parse_seconds(std::string field, std::size_t line, const std::string& name) {
    const auto b = field.find_first_not_of(" \t");
    const auto e = field.find_last_not_of(" \t");
    field = b == std::string::npos ? std::string() : field.substr(b, e - b + 1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v)) {
        fail(line, name, "not a number: '" + field + "'");
    }
    return v;
}

// Minimal CSV field quoting for the free-text label column.
std::string unquote(const std::string& field, std::size_t line) {
    if (field.empty() || field.front() != '"') {
        return field;
    }
    std::string out;
    for (std::size_t i = 1; i < field.size(); ++i) {
        if (field[i] == '"') {
            if (i + 1 < field.size() && field[i + 1] == '"') {
                out.push_back('"');
                ++i;
            } else if (i + 1 == field.size()) {
                return out;
            } else {
                break;
            }
        } else {
            out.push_back(field[i]);
        }
    }
    fail(line, "label", "unterminated or malformed quoted field");
}

std::string quote(const std::string& label) {
    if (label.find_first_of(",\"") == std::string::npos) {
        return label;
    }
    std::string out = "\"";
    for (char c : label) {
        if (c == '"') {
            out.push_back('"');
        }
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

std::int64_t FeatureStream::total_frames() const noexcept {
    const std::int64_t past_last = frames.empty() ? 0 : frames.back().frame_index + 1;
    return std::max(metadata.frame_count, past_last);
}

FeatureStream read_stream(std::istream& in) {
    FeatureStream stream;
    std::string text;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, text)) {
        ++line_no;
        if (text.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        json j;
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            fail(line_no, "<record>", std::string("malformed JSON: ") + e.what());
        }
        if (!j.is_object()) {
            fail(line_no, "<record>", "expected a JSON object");
        }
        if (!have_header) {
            have_header = true;
            if (const auto it = j.find("format"); it == j.end() || !it->is_string()) {
                fail(line_no, "format", "header line must carry a format string");
            } else if (it->get<std::string>() != kStreamFormat) {
                fail(line_no, "format", "unsupported format '" + it->get<std::string>() + "'");
            }
            if (const auto it = j.find("fps"); it != j.end()) {
                if (!it->is_number() || !(it->get<double>() > 0.0)) {
                    fail(line_no, "fps", "must be a positive number");
                }
                stream.metadata.fps = it->get<double>();
            }
            if (const auto it = j.find("frame_count"); it != j.end()) {
                if (!it->is_number_integer() || it->get<std::int64_t>() < 0) {
                    fail(line_no, "frame_count", "must be a non-negative integer");
                }
                stream.metadata.frame_count = it->get<std::int64_t>();
            }
            if (const auto it = j.find("source"); it != j.end()) {
                if (!it->is_string()) {
                    fail(line_no, "source", "must be a string");
                }
                stream.metadata.source_id = it->get<std::string>();
            }
            continue;
        }
        FrameRecord record;
        const auto fit = j.find("frame");
        if (fit == j.end() || !fit->is_number_integer() || fit->get<std::int64_t>() < 0) {
            fail(line_no, "frame", "must be a non-negative integer");
        }
        record.frame_index = fit->get<std::int64_t>();
        if (!stream.frames.empty() && record.frame_index <= stream.frames.back().frame_index) {
            fail(line_no, "frame",
                 "frame " + std::to_string(record.frame_index) + " does not follow frame " +
                     std::to_string(stream.frames.back().frame_index));
        }
        const auto faces = j.find("faces");
        if (faces == j.end() || !faces->is_array()) {
            fail(line_no, "faces", "must be an array");
        }
        for (std::size_t i = 0; i < faces->size(); ++i) {
            record.faces.push_back(
                parse_face((*faces)[i], line_no, record.frame_index, "faces[" + std::to_string(i) + "]"));
        }
        stream.frames.push_back(std::move(record));
    }
    return stream;
}

FeatureStream read_stream(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open stream file " + path.string());
    }
    return read_stream(in);
}

void validate_stream(const FeatureStream& stream) {
    if (!(stream.metadata.fps > 0.0)) {
        fail(1, "fps", "must be positive");
    }
    for (std::size_t f = 0; f < stream.frames.size(); ++f) {
        const auto& rec = stream.frames[f];
        const std::size_t line = f + 2;
        if (rec.frame_index < 0 || (f > 0 && rec.frame_index <= stream.frames[f - 1].frame_index)) {
            fail(line, "frame", "frame indices must be non-negative and strictly increasing");
        }
        for (std::size_t i = 0; i < rec.faces.size(); ++i) {
            if (rec.faces[i].observation.frame_index != rec.frame_index) {
                fail(line, "faces[" + std::to_string(i) + "]", "observation frame differs from record");
            }
            check_face(rec.faces[i], line, "faces[" + std::to_string(i) + "]");
        }
    }
}

void write_stream(const FeatureStream& stream, std::ostream& out) {
    json header;
    header["format"] = kStreamFormat;
    header["fps"] = stream.metadata.fps;
    header["frame_count"] = stream.metadata.frame_count;
    header["source"] = stream.metadata.source_id;
    out << header.dump() << '\n';
    for (const auto& rec : stream.frames) {
        json j;
        j["frame"] = rec.frame_index;
        j["faces"] = json::array();
        for (const auto& face : rec.faces) {
            j["faces"].push_back(face_to_json(face));
        }
        out << j.dump() << '\n';
    }
}

void write_stream(const FeatureStream& stream, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write stream file " + path.string());
    }
    write_stream(stream, out);
}

std::vector<GroundTruthWindow> read_annotations(std::istream& in, double fps) {
    std::vector<GroundTruthWindow> out;
    std::string text;
    std::size_t line_no = 0;
    while (std::getline(in, text)) {
        ++line_no;
        if (!text.empty() && text.back() == '\r') {
            text.pop_back();
        }
        if (text.empty() || text.front() == '#') {
            continue;
        }
        if (line_no == 1 && text.rfind("start_seconds", 0) == 0) {
            continue;
        }
        const auto first = text.find(',');
        const auto second = first == std::string::npos ? first : text.find(',', first + 1);
        if (second == std::string::npos) {
            fail(line_no, "start_seconds,end_seconds", "expected three comma-separated columns");
        }
        const double start = parse_seconds(text.substr(0, first), line_no, "start_seconds");
        const double end = parse_seconds(text.substr(first + 1, second - first - 1), line_no, "end_seconds");
        if (start < 0.0 || end < start) {
            fail(line_no, "end_seconds", "window must satisfy 0 <= start <= end");
        }
        out.push_back({std::llround(start * fps), std::llround(end * fps),
                       unquote(text.substr(second + 1), line_no)});
    }
    return out;
}

std::vector<GroundTruthWindow> read_annotations(const std::filesystem::path& path, double fps) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open annotation file " + path.string());
    }
    return read_annotations(in, fps);
}

void write_annotations(const std::vector<GroundTruthWindow>& windows, double fps, std::ostream& out) {
    out << "start_seconds,end_seconds,label\n";
    std::ostringstream row;
    row.precision(17);
    for (const auto& w : windows) {
        row.str("");
        row << static_cast<double>(w.start_frame) / fps << ','
            << static_cast<double>(w.end_frame) / fps << ',' << quote(w.label) << '\n';
        out << row.str();
    }
}

void write_annotations(const std::vector<GroundTruthWindow>& windows, double fps,
                       const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write annotation file " + path.string());
    }
    write_annotations(windows, fps, out);
}

}  // namespace vcad
