//! Plain-text map format and the bundled map set.
//!
//! Format: first line `W H`, then H rows of W glyphs, then an optional
//! `resources MAX MIN` line. Glyphs: `.` empty, `M` mine, `B`/`b` base,
//! `R`/`r` barracks, `W`/`w` worker, `L`/`l` light (upper case is max,
//! lower case is min). Max starts at the top, min at the bottom; each
//! player starts with 5 resources and each mine holds 20.

use std::sync::Arc;

use crate::state::{GameState, Pos};
use crate::units::{Owner, Player, UnitKind, UnitStats};
use crate::SimError;

pub fn parse_map(text: &str, stats: Arc<UnitStats>) -> Result<GameState, SimError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('#')
    });
    let (idx, header) = lines.next().ok_or(SimError::MapParse {
        line: 0,
        msg: "empty map".into(),
    })?;
    let mut dims = header.split_whitespace();
    let parse_dim = |token: Option<&str>| -> Result<u8, SimError> {
        token
            .and_then(|t| t.parse::<u8>().ok())
            .filter(|&v| v > 0)
            .ok_or(SimError::MapParse {
                line: idx + 1,
                msg: "expected `W H` header".into(),
            })
    };
    let width = parse_dim(dims.next())?;
    let height = parse_dim(dims.next())?;
    let mut state = GameState::new(width, height, stats);
    state.resources = [5, 5];

    let mut rows = 0u8;
    for (line_idx, line) in lines {
        let trimmed = line.trim();
        if let Some(rest) = trimmed.strip_prefix("resources") {
            let mut parts = rest.split_whitespace();
            let parse_res = |token: Option<&str>| -> Result<u32, SimError> {
                token
                    .and_then(|t| t.parse::<u32>().ok())
                    .ok_or(SimError::MapParse {
                        line: line_idx + 1,
                        msg: "expected `resources MAX MIN`".into(),
                    })
            };
            state.resources = [parse_res(parts.next())?, parse_res(parts.next())?];
            continue;
        }
        if rows >= height {
            return Err(SimError::MapParse {
                line: line_idx + 1,
                msg: "more rows than the header height".into(),
            });
        }
        if trimmed.chars().count() != width as usize {
            return Err(SimError::MapParse {
                line: line_idx + 1,
                msg: format!("row width {} != {}", trimmed.chars().count(), width),
            });
        }
        for (x, glyph) in trimmed.chars().enumerate() {
            let pos = Pos::new(x as u8, rows);
            let (owner, kind) = match glyph {
                '.' => continue,
                'M' => (Owner::Neutral, UnitKind::Mine),
                'B' => (Owner::Player(Player::Max), UnitKind::Base),
                'b' => (Owner::Player(Player::Min), UnitKind::Base),
                'R' => (Owner::Player(Player::Max), UnitKind::Barracks),
                'r' => (Owner::Player(Player::Min), UnitKind::Barracks),
                'W' => (Owner::Player(Player::Max), UnitKind::Worker),
                'w' => (Owner::Player(Player::Min), UnitKind::Worker),
                'L' => (Owner::Player(Player::Max), UnitKind::Light),
                'l' => (Owner::Player(Player::Min), UnitKind::Light),
                other => {
                    return Err(SimError::MapParse {
                        line: line_idx + 1,
                        msg: format!("unknown glyph `{other}`"),
                    })
                }
            };
            state.spawn(owner, kind, pos).map_err(|_| SimError::MapParse {
                line: line_idx + 1,
                msg: format!("two units share cell ({x}, {rows})"),
            })?;
        }
        rows += 1;
    }
    if rows != height {
        return Err(SimError::MapParse {
            line: 0,
            msg: format!("{rows} rows, header said {height}"),
        });
    }
    Ok(state)
}

pub const MAP_8X8_1BASE: &str = "\
8 8
MWB.....
........
........
........
........
........
........
.....bwM
resources 5 5
";

pub const MAP_8X8_2BASE: &str = "\
8 8
M......M
.B....B.
.W....W.
........
........
.w....w.
.b....b.
M......M
resources 5 5
";

pub const MAP_8X8_3BASE: &str = "\
8 8
M..M..M.
B..B..B.
W..W..W.
........
........
.w..w..w
.b..b..b
.M..M..M
resources 5 5
";

pub const MAP_8X8_4BASE: &str = "\
8 8
MMMMMMM.
BBBB....
WWWW....
........
........
....wwww
....bbbb
.MMMMMMM
resources 5 5
";

pub const MAP_12X12_1BASE: &str = "\
12 12
MWB.........
............
............
............
............
............
............
............
............
............
............
.........bwM
resources 5 5
";

pub const MAP_12X12_2BASE: &str = "\
12 12
M..........M
.B........B.
.W........W.
............
............
............
............
............
............
.w........w.
.b........b.
M..........M
resources 5 5
";

pub const MAP_12X12_3BASE: &str = "\
12 12
M....M....M.
B....B....B.
W....W....W.
............
............
............
............
............
............
.w....w....w
.b....b....b
.M....M....M
resources 5 5
";

pub const MAP_12X12_4BASE: &str = "\
12 12
MMMMMMM.....
BBBB........
WWWW........
............
............
............
............
............
............
........wwww
........bbbb
.....MMMMMMM
resources 5 5
";

pub const MAP_NAMES: [&str; 8] = [
    "8x8-1base",
    "8x8-2base",
    "8x8-3base",
    "8x8-4base",
    "12x12-1base",
    "12x12-2base",
    "12x12-3base",
    "12x12-4base",
];

/// Loads a bundled map by name.
pub fn builtin_map(name: &str, stats: Arc<UnitStats>) -> Result<GameState, SimError> {
    let text = match name {
        "8x8-1base" => MAP_8X8_1BASE,
        "8x8-2base" => MAP_8X8_2BASE,
        "8x8-3base" => MAP_8X8_3BASE,
        "8x8-4base" => MAP_8X8_4BASE,
        "12x12-1base" => MAP_12X12_1BASE,
        "12x12-2base" => MAP_12X12_2BASE,
        "12x12-3base" => MAP_12X12_3BASE,
        "12x12-4base" => MAP_12X12_4BASE,
        other => {
            return Err(SimError::UnknownMap(other.to_string()));
        }
    };
    parse_map(text, stats)
}
