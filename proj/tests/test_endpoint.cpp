/* Copyright 2026 The promptrt Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <atomic>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "promptrt/endpoint_model.hpp"

using namespace promptrt;
using nlohmann::json;

namespace {

// Local completions endpoint double. Handlers inspect the request body and
// build canned OpenAI-shaped responses.
class FakeServer {
 public:
  explicit FakeServer(httplib::Server::Handler handler) {
    server_.Post("/v1/completions", std::move(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeServer() {
    server_.stop();
    thread_.join();
  }
  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

EndpointConfig test_config(const std::string& base) {
  EndpointConfig cfg;
  cfg.base_url = base;
  cfg.api_key = "sk-test";
  cfg.model_id = "babbage";
  cfg.backoff_base = std::chrono::milliseconds(1);
  return cfg;
}

// Echo-scoring response: one token per character, offsets over the prompt.
json echo_logprob_response(const std::string& prompt, double per_char_lp) {
  json tokens = json::array();
  json offsets = json::array();
  json lps = json::array();
  for (std::size_t i = 0; i < prompt.size(); ++i) {
    tokens.push_back(std::string(1, prompt[i]));
    offsets.push_back(i);
    if (i == 0) {
      lps.push_back(nullptr);  // the first echoed token has no conditional
    } else {
      lps.push_back(per_char_lp);
    }
  }
  return {{"choices",
           {{{"text", prompt},
             {"finish_reason", "stop"},
             {"logprobs",
              {{"tokens", tokens}, {"token_logprobs", lps}, {"text_offset", offsets}}}}}}};
}

}  // namespace

TEST_CASE("generate sends the wire protocol fields and parses tokens") {
  std::string seen_auth;
  json seen_body;
  FakeServer server([&](const httplib::Request& req, httplib::Response& res) {
    seen_auth = req.get_header_value("Authorization");
    seen_body = json::parse(req.body);
    json out = {
        {"choices",
         {{{"text", " Hello"},
           {"finish_reason", "length"},
           {"logprobs",
            {{"tokens", {" Hel", "lo"}},
             {"token_logprobs", {-0.25, -0.5}},
             {"text_offset", {0, 4}}}}}}}};
    res.set_content(out.dump(), "application/json");
  });

  EndpointModel model(test_config(server.base_url()));
  GenParams p;
  p.max_tokens = 2;
  p.temperature = 0.0;
  p.logprobs = true;
  p.stop = {"\n"};
  Completion c = model.generate("English:", p);

  CHECK(seen_auth == "Bearer sk-test");
  CHECK(seen_body["model"] == "babbage");
  CHECK(seen_body["prompt"] == "English:");
  CHECK(seen_body["max_tokens"] == 2);
  CHECK(seen_body["temperature"] == 0.0);
  CHECK(seen_body["top_p"] == 1.0);
  CHECK(seen_body["stop"][0] == "\n");
  CHECK(seen_body["logprobs"] == 1);
  CHECK(seen_body["echo"] == false);

  REQUIRE(c.tokens.size() == 2);
  CHECK(c.tokens[0].text == " Hel");
  CHECK(c.tokens[0].logprob == -0.25);
  CHECK(c.text() == " Hello");
  CHECK(c.finish_reason == FinishReason::max_tokens);
}

TEST_CASE("retryable statuses back off and eventually succeed") {
  std::atomic<int> hits{0};
  FakeServer server([&](const httplib::Request&, httplib::Response& res) {
    if (++hits <= 2) {
      res.status = 503;
      res.set_content("overloaded", "text/plain");
      return;
    }
    json out = {{"choices", {{{"text", "ok"}, {"finish_reason", "stop"}}}}};
    res.set_content(out.dump(), "application/json");
  });

  EndpointModel model(test_config(server.base_url()));
  Completion c = model.generate("x", GenParams{});
  CHECK(c.text() == "ok");
  CHECK(hits == 3);
}

TEST_CASE("non-retryable failures surface status and body excerpt") {
  std::atomic<int> hits{0};
  FakeServer server([&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 400;
    res.set_content("{\"error\": \"bad model\"}", "application/json");
  });

  EndpointModel model(test_config(server.base_url()));
  try {
    model.generate("x", GenParams{});
    FAIL("expected EndpointError");
  } catch (const EndpointError& e) {
    CHECK(e.status() == 400);
    CHECK(e.body_excerpt().find("bad model") != std::string::npos);
  }
  CHECK(hits == 1);
}

TEST_CASE("exhausted retries raise EndpointError with the last status") {
  std::atomic<int> hits{0};
  FakeServer server([&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 500;
  });

  EndpointConfig cfg = test_config(server.base_url());
  cfg.max_retries = 2;
  EndpointModel model(cfg);
  CHECK_THROWS_AS(model.generate("x", GenParams{}), EndpointError);
  CHECK(hits == 3);  // initial try + 2 retries
}

TEST_CASE("score_continuation echoes and sums fragment logprobs by offset") {
  json seen_body;
  FakeServer server([&](const httplib::Request& req, httplib::Response& res) {
    seen_body = json::parse(req.body);
    res.set_content(
        echo_logprob_response(seen_body["prompt"].get<std::string>(), -0.5).dump(),
        "application/json");
  });

  EndpointModel model(test_config(server.base_url()));
  double lp = model.score_continuation("abc", "de");
  CHECK(seen_body["echo"] == true);
  CHECK(seen_body["max_tokens"] == 0);
  CHECK(seen_body["prompt"] == "abcde");
  // one-char tokens: exactly the two fragment characters count
  CHECK(lp == doctest::Approx(-1.0));
}

TEST_CASE("a token straddling the boundary belongs to the fragment") {
  FakeServer server([&](const httplib::Request& req, httplib::Response& res) {
    auto body = json::parse(req.body);
    std::string prompt = body["prompt"].get<std::string>();  // "abcde"
    json out = {
        {"choices",
         {{{"text", prompt},
           {"finish_reason", "stop"},
           {"logprobs",
            {{"tokens", {"ab", "cd", "e"}},
             {"token_logprobs", {nullptr, -0.25, -0.125}},
             {"text_offset", {0, 2, 4}}}}}}}};
    res.set_content(out.dump(), "application/json");
  });

  EndpointModel model(test_config(server.base_url()));
  // boundary at 3: "cd" spans [2,4) and straddles it -> counted
  double lp = model.score_continuation("abc", "de");
  CHECK(lp == doctest::Approx(-0.375));
}

TEST_CASE("missing offsets raise BoundaryUnalignable") {
  FakeServer server([&](const httplib::Request& req, httplib::Response& res) {
    auto body = json::parse(req.body);
    json out = {
        {"choices",
         {{{"text", body["prompt"]},
           {"finish_reason", "stop"},
           {"logprobs",
            {{"tokens", {"x"}}, {"token_logprobs", {-1.0}}}}}}}};
    res.set_content(out.dump(), "application/json");
  });

  EndpointModel model(test_config(server.base_url()));
  CHECK_THROWS_AS(model.score_continuation("a", "b"), BoundaryUnalignable);
}

TEST_CASE("base URL and key fall back to the environment") {
  std::string seen_auth;
  FakeServer server([&](const httplib::Request& req, httplib::Response& res) {
    seen_auth = req.get_header_value("Authorization");
    json out = {{"choices", {{{"text", "ok"}, {"finish_reason", "stop"}}}}};
    res.set_content(out.dump(), "application/json");
  });

  setenv("PROMPTRT_API_BASE", server.base_url().c_str(), 1);
  setenv("PROMPTRT_API_KEY", "sk-env", 1);
  EndpointConfig cfg;  // both fields left empty on purpose
  cfg.model_id = "curie";
  cfg.backoff_base = std::chrono::milliseconds(1);
  EndpointModel model(cfg);
  unsetenv("PROMPTRT_API_BASE");
  unsetenv("PROMPTRT_API_KEY");

  CHECK(model.generate("x", GenParams{}).text() == "ok");
  CHECK(seen_auth == "Bearer sk-env");
}

TEST_CASE("a missing base URL is rejected up front") {
  unsetenv("PROMPTRT_API_BASE");
  EndpointConfig cfg;
  cfg.model_id = "babbage";
  CHECK_THROWS_AS(EndpointModel{cfg}, EndpointError);
}

TEST_CASE("endpoint base URLs may carry a path prefix") {
  httplib::Server prefixed;
  prefixed.Post("/proxy/v1/completions", [](const httplib::Request&, httplib::Response& res) {
    json out = {{"choices", {{{"text", "ok"}, {"finish_reason", "stop"}}}}};
    res.set_content(out.dump(), "application/json");
  });
  int port = prefixed.bind_to_any_port("127.0.0.1");
  std::thread t([&] { prefixed.listen_after_bind(); });
  prefixed.wait_until_ready();

  EndpointModel model(test_config("http://127.0.0.1:" + std::to_string(port) + "/proxy"));
  CHECK(model.generate("x", GenParams{}).text() == "ok");

  prefixed.stop();
  t.join();
}
