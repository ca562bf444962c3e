//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the target exits nonzero if any criterion fails.
//!
//!     cargo test --release --test acceptance

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::net::SocketAddr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use scoutbot::bridge::{load_rules, run_bridge, ConnectPolicy};
use scoutbot::dialogue::{DialogueEvent, RnStatus};
use scoutbot::harness::{
    gen_corpus, seed_from_env, train_and_evaluate, EventKind, PipelineConfig, RunLog, Runner, Scenario, DEFAULT_SEED,
};
use scoutbot::messaging::{BrokerConfig, BrokerHandle, BusClient};
use scoutbot::navigator::{to_twist, Instruction, MotionProfile};
use scoutbot::nlu::{tokenize, Label, RelevanceModel, TrainingPair, DEFAULT_LAMBDA};
use scoutbot::simworld::{
    angle_diff, arc_pose, lidar_scan, Cell, Pose, Rect, SimConfig, SimWorld, World,
};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn seed() -> u64 {
    seed_from_env(DEFAULT_SEED)
}

fn rt() -> tokio::runtime::Runtime {
    tokio::runtime::Builder::new_multi_thread().worker_threads(4).enable_all().build().unwrap()
}

// ---------------------------------------------------------------- figure 2

/// Dialogue milestones in a run, ignoring Commander echoes, `started` and
/// the "Done." / photo notices.
fn milestones(log: &RunLog) -> Vec<String> {
    log.events
        .iter()
        .filter_map(|e| {
            let (kind, text) = EventKind::of(e);
            match kind {
                EventKind::Clarification | EventKind::Negative | EventKind::Failed => Some(kind.name().to_string()),
                EventKind::Instruction | EventKind::FeedbackStart => Some(format!("{}: {text}", kind.name())),
                EventKind::Done => Some("done".into()),
                EventKind::Image => Some("photo".into()),
                _ => None,
            }
        })
        .collect()
}

fn figure2() -> Outcome {
    let started = Instant::now();
    let config = PipelineConfig::default().with_env();
    let runner = Runner::new(config).map_err(|e| e.to_string())?;
    let log = rt().block_on(runner.run_bus(&Scenario::bundled("figure2").unwrap())).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed().as_secs_f64();
    let expected = [
        "clarification",
        "instruction: Move forward 3 feet",
        "feedback_start: Moving...",
        "done",
        "instruction: Turn right 45 degrees",
        "feedback_start: Turning...",
        "done",
        "instruction: Take a picture",
        "feedback_start: Taking a photo...",
        "photo",
        "done",
    ];
    let got = milestones(&log);
    if got != expected {
        return Err(format!("sequence {got:?}"));
    }
    check(elapsed < 60.0, format!("sequence matches, {elapsed:.1} s"))
}

// ---------------------------------------------------------------- NLU accuracy

fn nlu_accuracy() -> Outcome {
    let corpus = gen_corpus(seed(), 1500).map_err(|e| e.to_string())?;
    let (_, report) = train_and_evaluate(&corpus, DEFAULT_LAMBDA).map_err(|e| e.to_string())?;
    check(
        report.heldout_pairs == 300 && report.accuracy >= 0.85 && report.filler_flip_rate <= 0.05,
        format!(
            "held-out {} accuracy {:.3} filler flips {:.3}",
            report.heldout_pairs, report.accuracy, report.filler_flip_rate
        ),
    )
}

// ---------------------------------------------------------------- classifier oracle

/// Naive scorer: rebuilds every count from the raw pairs for each query.
fn brute_force_top(pairs: &[TrainingPair], lambda: f64, query: &str, k: usize) -> Vec<(String, f64)> {
    let mut vocab = BTreeSet::new();
    let mut collection: HashMap<String, u64> = HashMap::new();
    let mut classes: BTreeMap<String, (HashMap<String, u64>, u64, u64)> = BTreeMap::new();
    for p in pairs {
        let id = format!("{}|{}|{}", p.label, p.rn_instruction.as_deref().unwrap_or(""), p.commander_response);
        let entry = classes.entry(id).or_default();
        entry.2 += 1;
        for w in tokenize(&p.utterance) {
            *entry.0.entry(w.clone()).or_default() += 1;
            entry.1 += 1;
            *collection.entry(w.clone()).or_default() += 1;
            vocab.insert(w);
        }
    }
    let c_total: u64 = collection.values().sum();
    let denom = (c_total + vocab.len() as u64 + 1) as f64;
    let total_pairs = pairs.len() as f64;

    let q = tokenize(query);
    let mut q_counts: BTreeMap<&str, u64> = BTreeMap::new();
    for w in &q {
        *q_counts.entry(w).or_default() += 1;
    }
    let mut scored: Vec<(String, f64)> = classes
        .iter()
        .map(|(id, (counts, len, n_pairs))| {
            if q.is_empty() {
                return (id.clone(), (*n_pairs as f64 / total_pairs).ln());
            }
            let mut s = 0.0;
            for (w, n) in &q_counts {
                let bg = (collection.get(*w).copied().unwrap_or(0) + 1) as f64 / denom;
                let p = if *len == 0 {
                    bg
                } else {
                    (1.0 - lambda) * (counts.get(*w).copied().unwrap_or(0) as f64 / *len as f64) + lambda * bg
                };
                s += (*n as f64 / q.len() as f64) * p.ln();
            }
            (id.clone(), s)
        })
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    scored.truncate(k);
    scored
}

const TOY_WORDS: [&str; 14] =
    ["move", "go", "forward", "back", "turn", "left", "right", "three", "feet", "photo", "see", "uh", "the", "cone"];

fn toy_utterance(rng: &mut ChaCha8Rng) -> String {
    let n = rng.gen_range(0..6);
    (0..n).map(|_| TOY_WORDS[rng.gen_range(0..TOY_WORDS.len())]).collect::<Vec<_>>().join(" ")
}

fn toy_corpus(rng: &mut ChaCha8Rng) -> Vec<TrainingPair> {
    let n = rng.gen_range(1..=50);
    (0..n)
        .map(|_| {
            let mut utt = toy_utterance(rng);
            if utt.is_empty() {
                utt = "go".into();
            }
            let r = rng.gen_range(0..6);
            match rng.gen_range(0..3) {
                0 => TrainingPair::actionable(&utt, "Moving...", &format!("Move forward {r} feet")),
                1 => TrainingPair::reply(&utt, &format!("Which way {r}?"), Label::Clarify),
                _ => TrainingPair::reply(&utt, "I can't do that.", Label::Reject),
            }
        })
        .collect()
}

fn classifier_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed());
    let mut queries = 0;
    for corpus_no in 0..100 {
        let pairs = toy_corpus(&mut rng);
        let lambda = rng.gen_range(0.05..0.95);
        let model = RelevanceModel::train(&pairs, lambda).map_err(|e| e.to_string())?;
        for _ in 0..10 {
            let mut query = toy_utterance(&mut rng);
            if rng.gen_bool(0.2) {
                query.push_str(" zebra");
            }
            let got: Vec<(String, f64)> = model
                .classify(&query, 3)
                .hits
                .iter()
                .map(|h| (model.classes()[h.class].id.clone(), h.score))
                .collect();
            let want = brute_force_top(&pairs, lambda, &query, 3);
            if got != want {
                return Err(format!("corpus {corpus_no} query {query:?}: {got:?} != {want:?}"));
            }
            queries += 1;
        }
    }
    Ok(format!("100 corpora, {queries} queries, top-3 identical"))
}

// ---------------------------------------------------------------- kinematics

fn rk4(pose: Pose, v: f64, w: f64, dt: f64, steps: usize) -> Pose {
    let f = |th: f64| (v * th.cos(), v * th.sin(), w);
    let h = dt / steps as f64;
    let (mut x, mut y, mut th) = (pose.x, pose.y, pose.theta);
    for _ in 0..steps {
        let k1 = f(th);
        let k2 = f(th + h / 2.0 * k1.2);
        let k3 = f(th + h / 2.0 * k2.2);
        let k4 = f(th + h * k3.2);
        x += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        y += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        th += h / 6.0 * (k1.2 + 2.0 * k2.2 + 2.0 * k3.2 + k4.2);
    }
    Pose::new(x, y, th)
}

fn kinematics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed());
    let tick = SimConfig::default().tick;
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let start = Pose::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-3.1..3.1));
        let v = rng.gen_range(-1.0..1.0);
        let w = if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(-2.0..2.0) };
        let dt = rng.gen_range(0.01..2.0);
        let steps = ((dt / tick).ceil() as usize).max(1) * 1000;
        let exact = arc_pose(start, v, w, dt);
        let numeric = rk4(start, v, w, dt, steps);
        let err = (exact.x - numeric.x).abs().max((exact.y - numeric.y).abs()).max((exact.theta - numeric.theta).abs());
        worst = worst.max(err);
    }
    if worst > 1e-6 {
        return Err(format!("arc vs RK4 worst error {worst:.2e}"));
    }

    let profile = MotionProfile::default();
    let mut sim = SimWorld::new(World::bundled("open").unwrap(), SimConfig::default());
    let mut worst_pos: f64 = 0.0;
    let mut worst_deg: f64 = 0.0;
    let go = |sim: &mut SimWorld, i: Instruction| {
        sim.drive(&to_twist(&i, &profile).unwrap(), |_| {});
    };
    for feet in [1, 3, 5, 10] {
        let before = sim.pose();
        go(&mut sim, Instruction::move_forward(feet).unwrap());
        go(&mut sim, Instruction::move_backward(feet).unwrap());
        worst_pos = worst_pos.max(before.distance_to(&sim.pose()));
    }
    for deg in [45, 90, 180] {
        let before = sim.pose();
        go(&mut sim, Instruction::turn_left(deg).unwrap());
        go(&mut sim, Instruction::turn_right(deg).unwrap());
        worst_deg = worst_deg.max(angle_diff(before.theta, sim.pose().theta).to_degrees());
    }
    check(
        worst_pos <= 0.01 && worst_deg <= 0.5,
        format!("arc vs RK4 worst {worst:.1e}; round trips {worst_pos:.1e} m, {worst_deg:.1e} deg"),
    )
}

// ---------------------------------------------------------------- lidar and map

fn inside(world: &World, x: f64, y: f64) -> bool {
    let r = &world.bounds;
    if x <= r.min_x || x >= r.max_x || y <= r.min_y || y >= r.max_y {
        return true;
    }
    world.obstacles.iter().any(|o| {
        let r = &o.rect;
        x >= r.min_x && x <= r.max_x && y >= r.min_y && y <= r.max_y
    })
}

/// Marches in fixed 1 mm steps until the point lands in an obstacle or
/// leaves the bounds.
fn march(world: &World, pose: Pose, bearing: f64, max_range: f64) -> f64 {
    const STEP: f64 = 1e-3;
    let (dx, dy) = (bearing.cos(), bearing.sin());
    let mut t = 0.0;
    while t < max_range {
        if inside(world, pose.x + t * dx, pose.y + t * dy) {
            return t;
        }
        t += STEP;
    }
    max_range
}

fn boxes_touch(a: &Rect, min_x: f64, min_y: f64, max_x: f64, max_y: f64) -> bool {
    a.min_x <= max_x && a.max_x >= min_x && a.min_y <= max_y && a.max_y >= min_y
}

/// True when the 3x3 block of cells around `(ix, iy)` touches an obstacle
/// or a wall of the bounds.
fn near_geometry(world: &World, grid_res: f64, cx: f64, cy: f64) -> bool {
    let h = 1.5 * grid_res;
    let (min_x, min_y, max_x, max_y) = (cx - h, cy - h, cx + h, cy + h);
    let b = &world.bounds;
    if min_x <= b.min_x || max_x >= b.max_x || min_y <= b.min_y || max_y >= b.max_y {
        return true;
    }
    world.obstacles.iter().any(|o| boxes_touch(&o.rect, min_x, min_y, max_x, max_y))
}

fn random_free_pose(world: &World, rng: &mut ChaCha8Rng) -> Pose {
    loop {
        let b = &world.bounds;
        let x = rng.gen_range(b.min_x..b.max_x);
        let y = rng.gen_range(b.min_y..b.max_y);
        if world.clearance(x, y) > 0.0 {
            return Pose::new(x, y, rng.gen_range(-3.1..3.1));
        }
    }
}

fn lidar_map() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed());
    let config = SimConfig::default();
    let res = config.resolution;
    let mut notes = Vec::new();
    for name in ["apartment", "alley"] {
        let world = World::bundled(name).unwrap();
        let mut sim = SimWorld::new(world.clone(), config.clone());
        let mut worst: f64 = 0.0;
        let mut rays = 0;
        let mut poses = vec![world.start];
        poses.extend((0..8).map(|_| random_free_pose(&world, &mut rng)));
        for pose in &poses {
            let scan = lidar_scan(&world, *pose, &config.lidar);
            for (a, r) in scan.angles.iter().zip(&scan.ranges) {
                worst = worst.max((r - march(&world, *pose, pose.theta + a, config.lidar.max_range)).abs());
                rays += 1;
            }
        }
        if worst >= res / 2.0 {
            return Err(format!("{name}: ray error {worst:.4} m over {rays} rays"));
        }

        // Full scans from the start and after each 90 degree turn, then walk
        // the map: every occupied cell must sit next to real geometry, and
        // every beam end inside range must land next to an occupied cell.
        let turn = to_twist(&Instruction::turn_left(90).unwrap(), &MotionProfile::default()).unwrap();
        let mut scans = vec![lidar_scan(&world, sim.pose(), &config.lidar)];
        sim.scan();
        for _ in 0..4 {
            sim.drive(&turn, |_| {});
            scans.push(lidar_scan(&world, sim.pose(), &config.lidar));
        }
        let grid = sim.grid();
        let mut occupied = 0;
        for iy in 0..grid.height {
            for ix in 0..grid.width {
                if grid.get(ix, iy) == Cell::Occupied {
                    occupied += 1;
                    let (cx, cy) = grid.cell_center(ix, iy);
                    if !near_geometry(&world, res, cx, cy) {
                        return Err(format!("{name}: occupied cell ({ix},{iy}) away from any surface"));
                    }
                }
            }
        }
        for scan in &scans {
            for (i, a) in scan.angles.iter().enumerate() {
                if !scan.is_hit(i) {
                    continue;
                }
                let b = scan.pose.theta + a;
                let (hx, hy) = (scan.pose.x + scan.ranges[i] * b.cos(), scan.pose.y + scan.ranges[i] * b.sin());
                let Some((ix, iy)) = grid.cell_of(hx.clamp(grid.origin_x, grid.origin_x + grid.width as f64 * res - 1e-9), hy.clamp(grid.origin_y, grid.origin_y + grid.height as f64 * res - 1e-9)) else {
                    return Err(format!("{name}: beam end outside grid"));
                };
                let found = (ix.saturating_sub(1)..=(ix + 1).min(grid.width - 1))
                    .any(|x| (iy.saturating_sub(1)..=(iy + 1).min(grid.height - 1)).any(|y| grid.get(x, y) == Cell::Occupied));
                if !found {
                    return Err(format!("{name}: no occupied cell within one cell of beam end ({hx:.3},{hy:.3})"));
                }
            }
        }
        notes.push(format!("{name}: {rays} rays worst {worst:.4} m, {occupied} occupied cells"));
    }
    Ok(notes.join("; "))
}

// ---------------------------------------------------------------- bridge soak

async fn bridge_soak() -> Outcome {
    let any: SocketAddr = "127.0.0.1:0".parse().unwrap();
    let a = BrokerHandle::start(any, BrokerConfig::default()).await.map_err(|e| e.to_string())?;
    let b = BrokerHandle::start(any, BrokerConfig::default()).await.map_err(|e| e.to_string())?;
    let rules = load_rules("rule dialogue soak.t -> robot soak.t identity\nrule robot soak.t -> dialogue soak.t identity")
        .map_err(|e| e.to_string())?;
    let bridge = run_bridge(rules, a.local_addr(), b.local_addr(), ConnectPolicy::default())
        .await
        .map_err(|e| e.to_string())?;
    let (a_obs, mut a_inbox) = BusClient::connect(a.local_addr(), "a-obs").await.map_err(|e| e.to_string())?;
    a_obs.subscribe("soak.t").await.map_err(|e| e.to_string())?;
    let (b_obs, mut b_inbox) = BusClient::connect(b.local_addr(), "b-obs").await.map_err(|e| e.to_string())?;
    b_obs.subscribe("soak.t").await.map_err(|e| e.to_string())?;
    let (a_pub, _) = BusClient::connect(a.local_addr(), "a-pub").await.map_err(|e| e.to_string())?;
    let (b_pub, _) = BusClient::connect(b.local_addr(), "b-pub").await.map_err(|e| e.to_string())?;

    // 100 messages injected on each bus.
    let injected = Instant::now();
    for i in 0..100 {
        a_pub.publish("soak.t", &format!("a{i}"), None).await.map_err(|e| e.to_string())?;
        b_pub.publish("soak.t", &format!("b{i}"), None).await.map_err(|e| e.to_string())?;
    }

    // Quiescence: no traffic on either bus for 500 ms, reached within 2 s.
    let quiet = Duration::from_millis(500);
    let mut seen_a = Vec::new();
    let mut seen_b = Vec::new();
    let mut last = Instant::now();
    loop {
        tokio::select! {
            Some(env) = a_inbox.recv() => { seen_a.push(env); last = Instant::now(); }
            Some(env) = b_inbox.recv() => { seen_b.push(env); last = Instant::now(); }
            _ = tokio::time::sleep(Duration::from_millis(20)) => {
                if last.elapsed() >= quiet { break; }
            }
        }
        if injected.elapsed() > Duration::from_secs(10) {
            break;
        }
    }
    let settled = last.duration_since(injected);
    bridge.stop().await;

    let copies = |seen: &[scoutbot::messaging::Envelope], from: char| {
        let marked: Vec<&str> = seen.iter().filter(|e| e.bridge_mark.is_some()).map(|e| e.payload.as_str()).collect();
        let originals = seen.iter().filter(|e| e.bridge_mark.is_none()).count();
        let all_foreign = marked.iter().all(|p| p.starts_with(from));
        let distinct: BTreeSet<&str> = marked.iter().copied().collect();
        (marked.len(), distinct.len(), originals, all_foreign)
    };
    let (a_copies, a_distinct, a_orig, a_ok) = copies(&seen_a, 'b');
    let (b_copies, b_distinct, b_orig, b_ok) = copies(&seen_b, 'a');
    check(
        a_copies == 100 && b_copies == 100 && a_distinct == 100 && b_distinct == 100 && a_orig == 100 && b_orig == 100 && a_ok && b_ok && settled <= Duration::from_secs(2),
        format!("copies A {a_copies} B {b_copies}, originals A {a_orig} B {b_orig}, quiet after {:.0} ms", settled.as_secs_f64() * 1e3),
    )
}

// ---------------------------------------------------------------- broker contract

fn payload(publisher: usize, i: usize) -> String {
    // Escapes, unicode, embedded JSON and separators must all survive untouched.
    format!("p{publisher}#{i} \"q\" \\ \n\t {{\"k\":[{i}]}} é ✓ {}", "x".repeat(i % 97))
}

async fn broker_contract() -> Outcome {
    const PUBLISHERS: usize = 4;
    const SUBSCRIBERS: usize = 4;
    const PER_PUBLISHER: usize = 2500;
    let broker = BrokerHandle::start("127.0.0.1:0".parse().unwrap(), BrokerConfig::default())
        .await
        .map_err(|e| e.to_string())?;
    let addr = broker.local_addr();
    let mut inboxes = Vec::new();
    let mut subs = Vec::new();
    for s in 0..SUBSCRIBERS {
        let (c, inbox) = BusClient::connect(addr, &format!("sub{s}")).await.map_err(|e| e.to_string())?;
        c.subscribe("load.*").await.map_err(|e| e.to_string())?;
        subs.push(c);
        inboxes.push(inbox);
    }
    let mut tasks = Vec::new();
    for p in 0..PUBLISHERS {
        let (c, _) = BusClient::connect(addr, &format!("pub{p}")).await.map_err(|e| e.to_string())?;
        tasks.push(tokio::spawn(async move {
            for i in 0..PER_PUBLISHER {
                c.publish(&format!("load.p{p}"), &payload(p, i), None).await.unwrap();
            }
            c
        }));
    }
    let mut pubs = Vec::new();
    for t in tasks {
        pubs.push(t.await.map_err(|e| e.to_string())?);
    }

    let total = PUBLISHERS * PER_PUBLISHER;
    for (s, inbox) in inboxes.iter_mut().enumerate() {
        let mut next = [0usize; PUBLISHERS];
        for _ in 0..total {
            let Some(env) = inbox.recv_timeout(Duration::from_secs(10)).await else {
                return Err(format!("subscriber {s}: only {} of {total} delivered", next.iter().sum::<usize>()));
            };
            let p: usize = env.origin.as_deref().and_then(|o| o.strip_prefix("pub")).and_then(|n| n.parse().ok()).ok_or("bad origin")?;
            let i = next[p];
            if env.topic != format!("load.p{p}") || env.payload != payload(p, i) || env.seq != i as u64 + 1 {
                return Err(format!("subscriber {s}: publisher {p} message {i} out of order or altered"));
            }
            next[p] += 1;
        }
        if inbox.recv_timeout(Duration::from_millis(200)).await.is_some() {
            return Err(format!("subscriber {s}: duplicate delivery"));
        }
    }
    drop(pubs);
    drop(subs);
    broker.stop().await;
    Ok(format!("{total} messages x {SUBSCRIBERS} subscribers, each exactly once and in order"))
}

// ---------------------------------------------------------------- unsupported instruction

fn unsupported() -> Outcome {
    let runner = Runner::new(PipelineConfig::default().with_env()).map_err(|e| e.to_string())?;
    let scenario = Scenario::parse("cone", "world apartment\nsay 0 Go to the orange cone\n").unwrap();
    let log = rt().block_on(runner.run_bus(&scenario)).map_err(|e| e.to_string())?;
    let statuses: Vec<&RnStatus> = log
        .events
        .iter()
        .filter_map(|e| match e {
            DialogueEvent::Status { report, .. } => Some(&report.status),
            _ => None,
        })
        .collect();
    let failed = statuses.iter().any(|s| matches!(s, RnStatus::Failed { .. }));
    let moved = statuses.iter().any(|s| matches!(s, RnStatus::Started));
    let negative: Vec<&str> = log
        .events
        .iter()
        .filter_map(|e| match EventKind::of(e) {
            (EventKind::Negative, text) => Some(text),
            _ => None,
        })
        .collect();
    let start = World::bundled("apartment").unwrap().start;
    check(
        failed && !moved && negative.iter().any(|t| t.starts_with("I'm unable")) && log.final_pose == start,
        format!("failed {failed}, started {moved}, feedback {negative:?}, pose unchanged {}", log.final_pose == start),
    )
}

fn main() -> std::process::ExitCode {
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("figure 2 flow", Box::new(figure2)),
        ("nlu accuracy and filler robustness", Box::new(nlu_accuracy)),
        ("classifier brute-force equivalence", Box::new(classifier_oracle)),
        ("kinematics oracle and round trips", Box::new(kinematics)),
        ("lidar ray-march and map boundary", Box::new(lidar_map)),
        ("bridge loop soak", Box::new(|| rt().block_on(bridge_soak()))),
        ("broker contract", Box::new(|| rt().block_on(broker_contract()))),
        ("unsupported instruction", Box::new(unsupported)),
    ];
    println!("seed {}", seed());
    let mut failed = Vec::new();
    for (name, run) in &criteria {
        match run() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                println!("FAIL  {name}: {detail}");
                failed.push(*name);
            }
        }
    }
    if failed.is_empty() {
        println!("all {} criteria passed", criteria.len());
        std::process::ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        std::process::ExitCode::FAILURE
    }
}
