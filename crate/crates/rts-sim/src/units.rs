//! Unit kinds, per-kind statistics, and the versioned stats file format.

use std::fmt;

use crate::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Player {
    Max,
    Min,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Max => Player::Min,
            Player::Min => Player::Max,
        }
    }

    /// +1 for max, -1 for min; rewards are max-perspective.
    pub fn sign(self) -> f64 {
        match self {
            Player::Max => 1.0,
            Player::Min => -1.0,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Player::Max => 0,
            Player::Min => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Player::Max => "max",
            Player::Min => "min",
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Owner {
    Player(Player),
    Neutral,
}

impl Owner {
    pub fn player(self) -> Option<Player> {
        match self {
            Owner::Player(p) => Some(p),
            Owner::Neutral => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnitKind {
    Base,
    Barracks,
    Worker,
    Light,
    Mine,
}

impl UnitKind {
    pub fn name(self) -> &'static str {
        match self {
            UnitKind::Base => "base",
            UnitKind::Barracks => "barracks",
            UnitKind::Worker => "worker",
            UnitKind::Light => "light",
            UnitKind::Mine => "mine",
        }
    }

    pub fn is_mobile(self) -> bool {
        matches!(self, UnitKind::Worker | UnitKind::Light)
    }

    /// Kinds this unit can produce, in the fixed action-enumeration order.
    pub fn producible(self) -> &'static [UnitKind] {
        match self {
            UnitKind::Worker => &[UnitKind::Base, UnitKind::Barracks],
            UnitKind::Base => &[UnitKind::Worker],
            UnitKind::Barracks => &[UnitKind::Light],
            _ => &[],
        }
    }
}

/// Statistics of one producible/ownable kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KindStats {
    pub cost: u32,
    pub max_hp: u16,
    pub damage: u16,
    /// Duration of the produce action that creates this kind.
    pub produce_time: u32,
}

/// The versioned stats table every simulation runs against.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitStats {
    pub version: String,
    pub move_duration: u32,
    pub harvest_duration: u32,
    pub return_duration: u32,
    pub attack_duration: u32,
    pub mine_capacity: u16,
    base: KindStats,
    barracks: KindStats,
    worker: KindStats,
    light: KindStats,
}

pub const DEFAULT_STATS_TEXT: &str = include_str!("../data/unit_stats.txt");

impl Default for UnitStats {
    fn default() -> Self {
        UnitStats::parse(DEFAULT_STATS_TEXT).expect("bundled stats table parses")
    }
}

impl UnitStats {
    pub fn kind(&self, kind: UnitKind) -> &KindStats {
        match kind {
            UnitKind::Base => &self.base,
            UnitKind::Barracks => &self.barracks,
            UnitKind::Worker => &self.worker,
            UnitKind::Light => &self.light,
            UnitKind::Mine => &KindStats {
                cost: 0,
                max_hp: 1,
                damage: 0,
                produce_time: 0,
            },
        }
    }

    pub fn cost(&self, kind: UnitKind) -> u32 {
        self.kind(kind).cost
    }

    pub fn max_hp(&self, kind: UnitKind) -> u16 {
        self.kind(kind).max_hp
    }

    pub fn damage(&self, kind: UnitKind) -> u16 {
        self.kind(kind).damage
    }

    /// Parses the key-value stats format. The first line must carry the
    /// version header `# rts-unit-stats <version>`.
    pub fn parse(text: &str) -> Result<UnitStats, SimError> {
        let mut lines = text.lines().enumerate();
        let version = loop {
            let (idx, line) = lines.next().ok_or(SimError::StatsParse {
                line: 0,
                msg: "empty stats file".into(),
            })?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let rest = line.strip_prefix("# rts-unit-stats").ok_or_else(|| {
                SimError::StatsParse {
                    line: idx + 1,
                    msg: "missing `# rts-unit-stats <version>` header".into(),
                }
            })?;
            break rest.trim().to_string();
        };

        let mut move_duration = None;
        let mut harvest_duration = None;
        let mut return_duration = None;
        let mut attack_duration = None;
        let mut mine_capacity = None;
        let mut kinds: [Option<KindStats>; 4] = [None; 4];

        for (idx, raw) in lines {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let key = tokens.next().unwrap();
            let parse_num = |token: Option<&str>| -> Result<u32, SimError> {
                token
                    .and_then(|t| t.parse::<u32>().ok())
                    .ok_or_else(|| SimError::StatsParse {
                        line: idx + 1,
                        msg: format!("bad numeric value after `{key}`"),
                    })
            };
            match key {
                "move_duration" => move_duration = Some(parse_num(tokens.next())?),
                "harvest_duration" => harvest_duration = Some(parse_num(tokens.next())?),
                "return_duration" => return_duration = Some(parse_num(tokens.next())?),
                "attack_duration" => attack_duration = Some(parse_num(tokens.next())?),
                "mine_capacity" => mine_capacity = Some(parse_num(tokens.next())? as u16),
                "worker" | "light" | "base" | "barracks" => {
                    let mut cost = None;
                    let mut hp = None;
                    let mut damage = None;
                    let mut produce_time = None;
                    while let Some(field) = tokens.next() {
                        let value = parse_num(tokens.next())?;
                        match field {
                            "cost" => cost = Some(value),
                            "hp" => hp = Some(value as u16),
                            "damage" => damage = Some(value as u16),
                            "produce_time" => produce_time = Some(value),
                            other => {
                                return Err(SimError::StatsParse {
                                    line: idx + 1,
                                    msg: format!("unknown field `{other}`"),
                                })
                            }
                        }
                    }
                    let stats = KindStats {
                        cost: cost.ok_or_else(|| SimError::StatsParse {
                            line: idx + 1,
                            msg: format!("`{key}` missing cost"),
                        })?,
                        max_hp: hp.ok_or_else(|| SimError::StatsParse {
                            line: idx + 1,
                            msg: format!("`{key}` missing hp"),
                        })?,
                        damage: damage.unwrap_or(0),
                        produce_time: produce_time.ok_or_else(|| SimError::StatsParse {
                            line: idx + 1,
                            msg: format!("`{key}` missing produce_time"),
                        })?,
                    };
                    let slot = match key {
                        "base" => 0,
                        "barracks" => 1,
                        "worker" => 2,
                        _ => 3,
                    };
                    kinds[slot] = Some(stats);
                }
                other => {
                    return Err(SimError::StatsParse {
                        line: idx + 1,
                        msg: format!("unknown key `{other}`"),
                    })
                }
            }
        }

        let missing = |what: &str| SimError::StatsParse {
            line: 0,
            msg: format!("missing `{what}`"),
        };
        Ok(UnitStats {
            version,
            move_duration: move_duration.ok_or_else(|| missing("move_duration"))?,
            harvest_duration: harvest_duration.ok_or_else(|| missing("harvest_duration"))?,
            return_duration: return_duration.ok_or_else(|| missing("return_duration"))?,
            attack_duration: attack_duration.ok_or_else(|| missing("attack_duration"))?,
            mine_capacity: mine_capacity.ok_or_else(|| missing("mine_capacity"))?,
            base: kinds[0].ok_or_else(|| missing("base"))?,
            barracks: kinds[1].ok_or_else(|| missing("barracks"))?,
            worker: kinds[2].ok_or_else(|| missing("worker"))?,
            light: kinds[3].ok_or_else(|| missing("light"))?,
        })
    }

    pub fn load(path: &std::path::Path) -> Result<UnitStats, SimError> {
        let text = std::fs::read_to_string(path).map_err(|e| SimError::StatsParse {
            line: 0,
            msg: format!("cannot read {}: {e}", path.display()),
        })?;
        UnitStats::parse(&text)
    }
}
