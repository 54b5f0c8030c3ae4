#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <nlohmann/json.hpp>

#include "evcharge/sim/engine.hpp"
#include "evcharge/telemetry/server.hpp"

using namespace evcharge;
using namespace evcharge::telemetry;
using json = nlohmann::json;

TEST_CASE("wire: set command parses", "[telemetry][wire]") {
  const auto r = parse_command(R"({"type":"set","seq":7,"path":"level1.i_cc","value":4.5})");
  const auto* c = std::get_if<ClientCommand>(&r);
  REQUIRE(c);
  REQUIRE(c->type == CommandType::set);
  REQUIRE(c->seq == 7);
  REQUIRE(c->path == "level1.i_cc");
  REQUIRE(c->value == 4.5);
  // command_message is the inverse of parse_command
  const auto again = parse_command(command_message(*c));
  REQUIRE(std::get<ClientCommand>(again).path == "level1.i_cc");
}

TEST_CASE("wire: errors name the offending field", "[telemetry][wire]") {
  const auto err = [](std::string_view s) { return std::get<WireError>(parse_command(s)); };
  REQUIRE(err("{nope").message.find("JSON") != std::string::npos);
  REQUIRE_FALSE(err("{nope").seq);
  REQUIRE(err("[1,2]").message.find("object") != std::string::npos);
  REQUIRE(err(R"({"seq":1})").message.find("'type'") != std::string::npos);
  REQUIRE(err(R"({"type":"start"})").message.find("'seq'") != std::string::npos);
  const auto bad_path = err(R"({"type":"set","seq":3,"value":1})");
  REQUIRE(bad_path.seq == 3);
  REQUIRE(bad_path.message.find("'path'") != std::string::npos);
  REQUIRE(err(R"({"type":"set","seq":3,"path":"a.b","value":"x"})").message.find("'value'") != std::string::npos);
  REQUIRE(err(R"({"type":"jump","seq":3})").message.find("jump") != std::string::npos);
}

TEST_CASE("wire: frames encode non-finite samples as null", "[telemetry][wire]") {
  const auto j = json::parse(frame_message(0.5, {"a", "b"}, {1.25, std::numeric_limits<double>::quiet_NaN()}));
  REQUIRE(j["type"] == "frame");
  REQUIRE(j["t"] == 0.5);
  REQUIRE(j["signals"]["a"] == 1.25);
  REQUIRE(j["signals"]["b"].is_null());
  REQUIRE(json::parse(error_message(std::nullopt, "x"))["seq"].is_null());
}

TEST_CASE("outbox drops the oldest frame, never control messages", "[telemetry][outbox]") {
  Outbox o(3);
  o.push_control("schema");
  o.push_frame("f1");
  o.push_frame("f2");
  o.push_frame("f3");  // full: f1 goes
  o.push_control("ack");
  REQUIRE(o.dropped() == 1);
  REQUIRE(o.pop() == "schema");
  REQUIRE(o.pop() == "f2");
  REQUIRE(o.pop() == "f3");
  REQUIRE(o.pop() == "ack");
  REQUIRE_FALSE(o.pop());
}

TEST_CASE("emission interval caps the frame rate", "[telemetry]") {
  REQUIRE(emission_interval(20e-6) == 50);
  REQUIRE(emission_interval(1e-3) == 1);
  REQUIRE(emission_interval(3e-4) == 4);
}

namespace {

struct Counter {
  double a = 1.0;
  double x = 0.0;
  sim::ParameterTable table;
  Counter() { table.add("counter.a", &a, -10.0, 10.0); }
  void input(const sim::StepClock&) {}
  void calculate(const sim::StepClock&) {}
  void output(const sim::StepClock& c) { x += a * c.step_size; }
  [[nodiscard]] std::optional<std::string_view> nonfinite_block() const { return std::nullopt; }
  [[nodiscard]] std::vector<std::string> signal_names() const { return {"x", "a"}; }
  void sample(std::span<double> out) const {
    out[0] = x;
    out[1] = a;
  }
  sim::ParameterTable& parameters() { return table; }
};

namespace net = boost::asio;
namespace websocket = boost::beast::websocket;

class Client {
 public:
  explicit Client(unsigned short port) : ws_(ioc_) {
    net::ip::tcp::resolver resolver(ioc_);
    net::connect(ws_.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
    ws_.handshake("127.0.0.1", "/");
  }

  void send(const std::string& text) { ws_.write(net::buffer(text)); }

  json read() {
    boost::beast::flat_buffer b;
    ws_.read(b);
    return json::parse(boost::beast::buffers_to_string(b.data()));
  }

  // Reads until a message of `type` arrives, collecting frame times seen on
  // the way.
  json until(const std::string& type, std::vector<double>* frame_times = nullptr) {
    for (;;) {
      auto j = read();
      if (j["type"] == "frame" && frame_times) frame_times->push_back(j["t"].get<double>());
      if (j["type"] == type) return j;
    }
  }

  void close() {
    boost::beast::error_code ec;
    ws_.close(websocket::close_code::normal, ec);
  }

 private:
  net::io_context ioc_;
  websocket::stream<net::ip::tcp::socket> ws_;
};

}  // namespace

TEST_CASE("service: schema, lifecycle, commands and report over a websocket", "[telemetry][service]") {
  Counter m;
  sim::SimConfig cfg;
  cfg.step_size = 1e-3;
  cfg.duration = 30.0;
  cfg.pacing = sim::Pacing::realtime;
  sim::Engine<Counter> engine(m, cfg);
  engine.set_state(sim::RunState::paused);
  engine.set_recording_enabled(false);

  Service<Counter> svc(engine, "127.0.0.1", 0);
  REQUIRE(svc.port() != 0);
  REQUIRE_THROWS_WITH(Service<Counter>(engine, "127.0.0.1", svc.port()),
                      Catch::Matchers::ContainsSubstring("cannot listen"));
  svc.start();

  sim::RunResult result;
  std::thread sim_thread([&] {
    result = engine.run();
    svc.finish(result.report);
  });

  Client c(svc.port());
  const auto schema = c.read();
  REQUIRE(schema["type"] == "schema");
  REQUIRE(schema["signals"] == json::array({"x", "a"}));

  c.send(R"({"type":"start","seq":1})");
  REQUIRE(c.until("ack")["seq"] == 1);

  std::vector<double> times;
  c.send(R"({"type":"set","seq":2,"path":"counter.a","value":2.5})");
  const auto ack = c.until("ack", &times);
  REQUIRE(ack["seq"] == 2);
  REQUIRE(ack["applied_step"].get<std::int64_t>() >= 0);

  c.send(R"({"type":"set","seq":3,"path":"counter.b","value":1})");
  const auto bad = c.until("error", &times);
  REQUIRE(bad["seq"] == 3);
  REQUIRE(bad["message"].get<std::string>().find("counter.b") != std::string::npos);

  c.send("not json");
  const auto junk = c.until("error", &times);
  REQUIRE(junk["seq"].is_null());

  // The value set at seq 2 shows up in later frames.
  json f;
  do f = c.until("frame", &times);
  while (f["signals"]["a"] != 2.5);

  c.send(R"({"type":"stop","seq":4})");
  REQUIRE(c.until("ack", &times)["seq"] == 4);
  const auto report = c.until("report", &times);
  REQUIRE(report["completed"] == false);
  REQUIRE(report["total_steps"].get<std::int64_t>() > 0);
  c.close();
  sim_thread.join();

  REQUIRE(times.size() > 2);
  for (std::size_t k = 1; k < times.size(); ++k) REQUIRE(times[k] > times[k - 1]);
  REQUIRE_FALSE(result.report.completed);
}
