#include <httplib.h>

#include <fstream>
#include <thread>

#include "fixtures.hpp"
#include "surgq/geometry.hpp"
#include "surgq/image_io.hpp"
#include "surgq/polygon_json.hpp"
#include "surgq/service.hpp"
#include "test_util.hpp"

namespace surgq {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing::TempDir;

class ApiTest : public ::testing::Test {
 protected:
  void SetUp() override {
    testing::write_small_project(dir_ / "p", 24, 7);
    api_ = std::make_unique<Api>(Project::load(dir_ / "p"));
  }

  const Project& project() const { return api_->project(); }
  const FrameRecord& frame(std::size_t i) const { return project().manifest().frames.at(i); }

  // A quiz whose questions all point at real frames and sections of the project.
  json valid_quiz() const {
    const auto& rec = frame(3);
    const auto scene = project().scene(rec);
    const auto& s1 = scene->sections.at(1).bounds;
    const DrawPath path{rec.frame, 1, "Trace the edge",
                        {{double(s1.x0), double(s1.y0)}, {double(s1.x1), double(s1.y1)}}, 30.0};
    Mcq mcq;
    mcq.stem = "Which structure is highlighted?";
    mcq.stem_frames = {rec.frame};
    mcq.options = {{"Liver", std::nullopt, {{rec.frame, SectionAnchor{0}, "This region", HighlightStyle::outline}}},
                   {"Fat", std::nullopt, {}}};
    mcq.correct = {0};
    Quiz quiz;
    quiz.title = "Anatomy";
    quiz.author = "tester";
    quiz.questions = {mcq, path};
    return to_json(quiz);
  }

  TempDir dir_;
  std::unique_ptr<Api> api_;
};

TEST_F(ApiTest, ListsFramesWithKeyframeFlags) {
  const auto r = api_->list_frames();
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body["frames"].size(), 24u);
  EXPECT_EQ(r.body["width"], 160);
  const auto& f0 = r.body["frames"][0];
  EXPECT_EQ(f0["id"], frame(0).frame.key());
  EXPECT_EQ(f0["image"], "/frames/" + frame(0).frame.key() + "/image");
  std::size_t flagged = 0;
  for (const auto& f : r.body["frames"]) flagged += f["keyframe"].get<bool>();
  EXPECT_EQ(flagged, api_->keyframes().body["keyframes"].size());
  EXPECT_GT(flagged, 0u);
}

TEST_F(ApiTest, PolygonsMatchDirectExtraction) {
  const auto r = api_->frame_polygons(frame(5).frame.key());
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body, to_json(extract_polygons(*project().scene(frame(5)))));
  EXPECT_EQ(api_->frame_polygons("synth:99999").status, 404);
  EXPECT_EQ(api_->frame_polygons("nonsense").status, 404);
}

TEST_F(ApiTest, ImagesAreEncoded) {
  const auto png = api_->frame_image(frame(0).frame.key());
  EXPECT_EQ(png.content_type, "image/png");
  const auto decoded =
      decode_rgb_png({reinterpret_cast<const std::uint8_t*>(png.bytes.data()), png.bytes.size()});
  EXPECT_EQ(decoded, project().image(frame(0)));
  const auto jpg = api_->frame_thumb(frame(0).frame.key());
  EXPECT_EQ(jpg.content_type, "image/jpeg");
  EXPECT_EQ(jpg.bytes.substr(0, 2), std::string("\xff\xd8"));
  const auto hl = api_->frame_highlight(frame(0).frame.key(), {{"anchor", {{"section", 0}}}, {"style", "arrow"}});
  EXPECT_EQ(hl.status, 200);
  EXPECT_EQ(hl.content_type, "image/png");
  EXPECT_EQ(api_->frame_highlight(frame(0).frame.key(), {{"anchor", {{"section", 999}}}}).status, 422);
}

TEST_F(ApiTest, SearchMatchesLibrary) {
  const auto query = extract_polygons(*project().scene(frame(10)));
  const auto r = api_->search({{"scene", to_json(query)}, {"k", 5}, {"min_gap_ms", 0}});
  ASSERT_EQ(r.status, 200) << r.body.dump();
  const auto index = project().current_index();
  ASSERT_TRUE(index);
  SearchOptions opts;
  opts.k = 5;
  opts.min_gap_ms = 0;
  EXPECT_EQ(r.body, search_payload(search(*index, query, opts), index->fingerprint()));
  EXPECT_EQ(r.body["results"][0]["id"], frame(10).frame.key());
  EXPECT_EQ(r.body["results"].size(), 5u);
}

TEST_F(ApiTest, SearchErrorsCarryPointers) {
  auto scene = to_json(extract_polygons(*project().scene(frame(0))));
  scene["polygons"][0]["vertices"][1] = {"x", 2};
  auto r = api_->search({{"scene", scene}});
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(r.body["error"]["code"], "ParseError");
  EXPECT_EQ(r.body["error"]["path"], "/scene/polygons/0/vertices/1");

  scene = to_json(extract_polygons(*project().scene(frame(0))));
  scene["width"] = 161;
  r = api_->search({{"scene", scene}});
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(r.body["error"]["path"], "/scene/width");
  EXPECT_EQ(api_->search({{"scene", to_json(extract_polygons(*project().scene(frame(0))))}, {"k", 0}}).body["error"]["path"],
            "/k");
  EXPECT_EQ(api_->search(json::array()).status, 400);
}

TEST_F(ApiTest, StaleIndexIsConflictUntilRebuilt) {
  {
    auto p = Project::open(dir_ / "p");
    p.manifest().features.reset();
    const auto& last = p.manifest().frames.back().frame;
    const auto cm = ClassMap::filled(160, 90, ClassId::fat);
    p.add_frame({last.video_id, last.frame_index + 1, last.timestamp_ms + 1000}, FusedScene::assemble(cm, SectionMask(160, 90, std::vector<std::uint16_t>(160 * 90, 0))),
                render_class_map(cm));
    p.save();
  }
  Api api(Project::load(dir_ / "p"));
  EXPECT_TRUE(api.index_stale());
  const auto query = to_json(extract_polygons(*api.project().scene(api.project().manifest().frames[0])));
  auto r = api.search({{"scene", query}});
  EXPECT_EQ(r.status, 409);
  EXPECT_EQ(r.body["error"]["code"], "StaleIndex");
  const auto rebuilt = api.rebuild_index();
  EXPECT_EQ(rebuilt.status, 200);
  EXPECT_EQ(rebuilt.body["frames"], 25);
  EXPECT_FALSE(api.index_stale());
  EXPECT_EQ(api.search({{"scene", query}}).status, 200);
  EXPECT_FALSE(Project::load(dir_ / "p").index_stale());
}

TEST_F(ApiTest, InvalidQuizIsUnprocessable) {
  auto quiz = valid_quiz();
  quiz["questions"][1]["target_section"] = 4000;
  quiz["questions"][0]["correct"] = json::array();
  const auto r = api_->create_quiz(quiz);
  EXPECT_EQ(r.status, 422);
  const auto& issues = r.body["error"]["issues"];
  ASSERT_EQ(issues.size(), 2u);
  EXPECT_EQ(issues[0]["code"], "EmptyCorrectSet");
  EXPECT_EQ(issues[0]["path"], "/questions/0/correct");
  EXPECT_EQ(issues[1]["code"], "DanglingSection");
  EXPECT_EQ(api_->list_quizzes().body["quizzes"].size(), 0u);
}

TEST_F(ApiTest, QuizLifecycle) {
  const auto created = api_->create_quiz(valid_quiz());
  ASSERT_EQ(created.status, 201) << created.body.dump();
  const std::string id = created.body["id"];
  EXPECT_FALSE(created.body["created_at"].get<std::string>().empty());

  auto fetched = api_->get_quiz(id);
  EXPECT_EQ(fetched.status, 200);
  EXPECT_EQ(fetched.body, created.body);

  auto edited = fetched.body;
  edited["title"] = "Anatomy II";
  const auto updated = api_->update_quiz(id, edited);
  EXPECT_EQ(updated.status, 200);
  EXPECT_EQ(updated.body["created_at"], created.body["created_at"]);
  EXPECT_EQ(api_->get_quiz(id).body["title"], "Anatomy II");
  edited["id"] = "other";
  EXPECT_EQ(api_->update_quiz(id, edited).body["error"]["path"], "/id");

  auto dup = valid_quiz();
  dup["id"] = id;
  EXPECT_EQ(api_->create_quiz(dup).status, 409);

  const auto listed = api_->list_quizzes().body["quizzes"];
  ASSERT_EQ(listed.size(), 1u);
  EXPECT_EQ(listed[0]["questions"], 2);

  // Changes persist for a fresh reader.
  EXPECT_EQ(Project::load(dir_ / "p").load_quiz(id).title, "Anatomy II");

  EXPECT_EQ(api_->delete_quiz(id).status, 200);
  EXPECT_EQ(api_->get_quiz(id).status, 404);
  EXPECT_EQ(api_->delete_quiz(id).status, 404);
  EXPECT_EQ(api_->get_quiz("../manifest").status, 404);
}

TEST_F(ApiTest, GradingMatchesLibrary) {
  const std::string id = api_->create_quiz(valid_quiz()).body["id"];
  const auto quiz = quiz_from_json(api_->get_quiz(id).body);

  auto r = api_->grade(id, {{"question", 0}, {"answer", {{"chosen", {0}}}}});
  ASSERT_EQ(r.status, 200) << r.body.dump();
  const std::vector<std::size_t> chosen{0};
  const auto mg = grade_mcq(std::get<Mcq>(quiz.questions[0]), chosen);
  EXPECT_EQ(r.body["correct"], mg.correct);
  EXPECT_EQ(r.body["feedback"].size(), mg.feedback.size());
  EXPECT_EQ(api_->grade(id, {{"question", 0}, {"answer", {{"chosen", {1}}}}}).body["correct"], false);
  EXPECT_EQ(api_->grade(id, {{"question", 0}, {"answer", {{"chosen", {7}}}}}).status, 400);

  const auto& dp = std::get<DrawPath>(quiz.questions[1]);
  std::vector<Point> student = dp.author_path;
  for (auto& p : student) p.x += 12;
  json path = json::array();
  for (const auto& p : student) path.push_back({p.x, p.y});
  r = api_->grade(id, {{"question", 1}, {"answer", {{"path", path}}}});
  ASSERT_EQ(r.status, 200) << r.body.dump();
  const auto pg = grade_path(dp, student);
  EXPECT_DOUBLE_EQ(r.body["distance"].get<double>(), pg.distance);
  EXPECT_DOUBLE_EQ(r.body["score"].get<double>(), pg.score);
  EXPECT_EQ(r.body["pass"], pg.pass);
  EXPECT_NEAR(pg.distance, 12.0, 1e-9);

  EXPECT_EQ(api_->grade(id, {{"question", 1}, {"answer", {{"path", {{1, 1}}}}}}).status, 400);
  EXPECT_EQ(api_->grade(id, {{"question", 9}, {"answer", json::object()}}).status, 404);
  EXPECT_EQ(api_->grade("missing", {{"question", 0}, {"answer", json::object()}}).status, 404);
}

TEST_F(ApiTest, InpaintWritesAssetAndFeedsExtractQuestion) {
  const auto key = frame(2).frame.key();
  const auto r = api_->inpaint({{"frame", key}, {"mask", {{"section", 1}}}});
  ASSERT_EQ(r.status, 201) << r.body.dump();
  const std::string rel = r.body["asset"];
  EXPECT_EQ(rel.rfind("assets/inpaint/", 0), 0u);
  EXPECT_TRUE(fs::exists(dir_ / "p" / rel));
  EXPECT_EQ(r.body["backend"], "diffusion");

  const auto served = api_->asset(rel.substr(std::string("assets/").size()));
  EXPECT_EQ(served.status, 200);
  EXPECT_EQ(served.content_type, "image/png");
  EXPECT_EQ(api_->asset("../manifest.json").status, 404);

  ExtractComponent ex;
  ex.frame = frame(2).frame;
  ex.removed_section = 1;
  ex.inpainted_asset = rel;
  ex.prompt = "Put it back";
  ex.tool_choices = {rel};
  ex.accepted_tools = {0};
  ex.placement = {{0, 0}, {160, 0}, {160, 90}, {0, 90}};
  Quiz quiz;
  quiz.title = "Extraction";
  quiz.questions = {ex};
  const auto created = api_->create_quiz(to_json(quiz));
  ASSERT_EQ(created.status, 201) << created.body.dump();
  const auto g = api_->grade(created.body["id"], {{"question", 0}, {"answer", {{"tool", 0}, {"placement", {10, 10}}}}});
  EXPECT_EQ(g.body["correct"], true);
}

TEST_F(ApiTest, FeedbackStartersFallBackToDefaults) {
  auto r = api_->feedback_starters();
  EXPECT_EQ(r.body["source"], "default");
  EXPECT_EQ(r.body["starters"], json(default_feedback_starters()));
  std::ofstream(dir_ / "p" / "feedback_starters.json") << R"({"starters": ["Note the {class}"]})";
  r = api_->feedback_starters();
  EXPECT_EQ(r.body["source"], "project");
  EXPECT_EQ(r.body["starters"], json::array({"Note the {class}"}));
  std::ofstream(dir_ / "p" / "feedback_starters.json") << R"({"starters": [3]})";
  r = api_->feedback_starters();
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(r.body["error"]["path"], "/starters/0");
}

TEST(FeedbackStarters, ShippedTemplateMatchesDefaults) {
  std::ifstream in(fs::path(SURGQ_CONFIG_DIR) / "feedback_starters.json");
  EXPECT_EQ(feedback_starters_from_json(json::parse(in)), default_feedback_starters());
}

TEST(ServiceMapping, StatusCodes) {
  EXPECT_EQ(http_status(Errc::parse_error), 400);
  EXPECT_EQ(http_status(Errc::validation_failed), 422);
  EXPECT_EQ(http_status(Errc::not_found), 404);
  EXPECT_EQ(http_status(Errc::stale_index), 409);
  EXPECT_EQ(http_status(Errc::backend_unavailable), 502);
  EXPECT_EQ(http_status(Errc::io_error), 500);
  const auto b = parse_bind_address(":9000");
  EXPECT_EQ(b.port, 9000);
  const auto c = parse_bind_address("0.0.0.0:81");
  EXPECT_EQ(c.host, "0.0.0.0");
  EXPECT_THROW(parse_bind_address("nope"), Error);
}

TEST_F(ApiTest, ServerRoutesOverHttp) {
  Server server(*api_);
  const int port = server.bind({"127.0.0.1", 0});
  ASSERT_GT(port, 0);
  std::thread runner([&] { server.run(); });

  httplib::Client client("127.0.0.1", port);
  client.set_read_timeout(10, 0);
  auto res = client.Get("/frames");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(res->body)["frames"].size(), 24u);

  const auto key = frame(4).frame.key();
  res = client.Get("/frames/" + key + "/polygons");
  ASSERT_TRUE(res);
  EXPECT_EQ(json::parse(res->body), api_->frame_polygons(key).body);

  const json body{{"scene", json::parse(res->body)}, {"k", 3}};
  res = client.Post("/search", body.dump(), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(res->body), api_->search(body).body);

  res = client.Post("/search", "{broken", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);

  res = client.Post("/quizzes", valid_quiz().dump(), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 201);
  const std::string id = json::parse(res->body)["id"];
  res = client.Post("/quizzes/" + id + "/grade", R"({"question": 0, "answer": {"chosen": [0]}})", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(json::parse(res->body)["correct"], true);
  res = client.Delete("/quizzes/" + id);
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);

  res = client.Get("/frames/" + key + "/thumb");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->get_header_value("Content-Type"), "image/jpeg");
  res = client.Get("/feedback-starters");
  ASSERT_TRUE(res);
  EXPECT_EQ(json::parse(res->body)["source"], "default");
  res = client.Get("/nothing-here");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 404);

  server.stop();
  runner.join();
}

}  // namespace
}  // namespace surgq
