#include <sstream>

#include "doctest.h"
#include "vcad/errors.hpp"
#include "vcad/stream_io.hpp"
#include "vcad/synth.hpp"

using vcad::FeatureStream;

namespace {

FeatureStream small_stream() {
    vcad::SyntheticScenario sc;
    sc.participant_count = 3;
    sc.duration_frames = 30;
    sc.seed = 4;
    sc.dual_channel = true;
    auto s = vcad::generate(sc).stream;
    s.frames[2].faces[0].observation.expression_label = vcad::Expression::Fear;
    s.frames[3].faces[1].observation.embedding.clear();
    return s;
}

std::string expect_error(const std::string& text) {
    std::istringstream in(text);
    try {
        vcad::read_stream(in);
    } catch (const vcad::ValidationError& e) {
        return e.what();
    }
    FAIL("expected a validation error");
    return {};
}

const char* kHeader = R"({"format":"vcad-features/1","fps":4,"frame_count":10,"source":"t"})";

}  // namespace

TEST_SUITE("stream_io") {

TEST_CASE("write then read is the identity") {
    const auto s = small_stream();
    std::stringstream buf;
    vcad::write_stream(s, buf);
    const auto back = vcad::read_stream(buf);
    CHECK(back == s);
    CHECK_NOTHROW(vcad::validate_stream(back));
}

TEST_CASE("empty input is an empty stream") {
    std::istringstream in("");
    const auto s = vcad::read_stream(in);
    CHECK(s.frames.empty());
    CHECK(s.total_frames() == 0);
}

TEST_CASE("schema violations name the line and field") {
    const std::string bad_expr = std::string(kHeader) +
                                 "\n{\"frame\":0,\"faces\":[{\"box\":[0,0,10,10],"
                                 "\"expression\":[0.2,0.2,0.2,0.2,0.1,0.1]}]}\n";
    const auto msg = expect_error(bad_expr);
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("faces[0].expression") != std::string::npos);

    CHECK(expect_error(std::string(kHeader) + "\n{\"frame\":3,\"faces\":[]}\n{\"frame\":3,\"faces\":[]}\n")
              .find("line 3") != std::string::npos);
    CHECK(expect_error(std::string(kHeader) + "\n{\"frame\":0,\"faces\":[{\"box\":[5,0,1,10]}]}\n")
              .find("box") != std::string::npos);
    CHECK(expect_error(std::string(kHeader) + "\n{\"frame\":0,\"faces\":[{\"box\":[0,0,1,1],"
                                              "\"expression\":[0.5,0.5,0.5,0,0,0,0]}]}\n")
              .find("sum") != std::string::npos);
    CHECK(expect_error(std::string(kHeader) + "\n{\"frame\":0,\"faces\":[{\"box\":[0,0,1,1],"
                                              "\"embedding\":[1,2,3]}]}\n")
              .find("embedding") != std::string::npos);
    CHECK(expect_error(std::string(kHeader) + "\n{\"frame\":0,\"faces\":[{\"box\":[0,0,1,1],"
                                              "\"label\":\"Bored\"}]}\n")
              .find("label") != std::string::npos);
    CHECK(expect_error(std::string(kHeader) + "\nnot json\n").find("line 2") != std::string::npos);
    CHECK(expect_error("{\"format\":\"other/2\"}\n").find("format") != std::string::npos);
    CHECK(expect_error(R"({"format":"vcad-features/1","fps":0})").find("fps") != std::string::npos);
}

TEST_CASE("unknown header keys are tolerated") {
    std::istringstream in(
        R"({"format":"vcad-features/1","fps":4,"frame_count":1,"source":"x","backends":{"a":"yolo"}})"
        "\n{\"frame\":0,\"faces\":[]}\n");
    const auto s = vcad::read_stream(in);
    CHECK(s.frames.size() == 1);
}

TEST_CASE("annotations convert seconds to frames") {
    std::istringstream in("start_seconds,end_seconds,label\n2.5,5,laughter\n10,10.1,\"zoom, bombing\"\n");
    const auto w = vcad::read_annotations(in, 4.0);
    REQUIRE(w.size() == 2);
    CHECK(w[0].start_frame == 10);
    CHECK(w[0].end_frame == 20);
    CHECK(w[0].label == "laughter");
    CHECK(w[1].start_frame == 40);
    CHECK(w[1].end_frame == 40);
    CHECK(w[1].label == "zoom, bombing");

    std::stringstream buf;
    vcad::write_annotations(w, 4.0, buf);
    CHECK(vcad::read_annotations(buf, 4.0) == w);
}

TEST_CASE("malformed annotations are rejected") {
    std::istringstream two_columns("start_seconds,end_seconds,label\n1,2\n");
    CHECK_THROWS_AS(vcad::read_annotations(two_columns, 4.0), vcad::ValidationError);
    std::istringstream trailing("start_seconds,end_seconds,label\n1,2s,x\n");
    CHECK_THROWS_AS(vcad::read_annotations(trailing, 4.0), vcad::ValidationError);
    std::istringstream reversed("start_seconds,end_seconds,label\n5,2,x\n");
    CHECK_THROWS_AS(vcad::read_annotations(reversed, 4.0), vcad::ValidationError);
    std::istringstream junk("start_seconds,end_seconds,label\nabc,2,x\n");
    CHECK_THROWS_AS(vcad::read_annotations(junk, 4.0), vcad::ValidationError);
}

}  // TEST_SUITE
