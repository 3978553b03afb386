//! Models bundled with the crate.

use crate::dsl::{lower, parse, Lowered, SourceFile};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CorpusFile {
    /// File name, e.g. `dough_cookie.tm`.
    pub name: &'static str,
    pub text: &'static str,
}

impl CorpusFile {
    pub fn source(&self) -> SourceFile {
        SourceFile::new(self.name, self.text)
    }

    /// Parses and lowers the file. Bundled files always succeed.
    pub fn load(&self) -> Lowered {
        let ast = parse(&self.source()).unwrap_or_else(|e| panic!("{}: {e:?}", self.name));
        lower(&ast).unwrap_or_else(|e| panic!("{}: {e:?}", self.name))
    }
}

pub const HEATING_WATER: CorpusFile = CorpusFile {
    name: "heating_water.tm",
    text: include_str!("../corpus/heating_water.tm"),
};

pub const RESERVATION_VIEW: CorpusFile = CorpusFile {
    name: "reservation_view.tm",
    text: include_str!("../corpus/reservation_view.tm"),
};

pub const DOUGH_COOKIE: CorpusFile = CorpusFile {
    name: "dough_cookie.tm",
    text: include_str!("../corpus/dough_cookie.tm"),
};

pub const TENDERING: CorpusFile = CorpusFile {
    name: "tendering.tm",
    text: include_str!("../corpus/tendering.tm"),
};

pub fn corpus() -> [CorpusFile; 4] {
    [HEATING_WATER, RESERVATION_VIEW, DOUGH_COOKIE, TENDERING]
}

pub fn find(name: &str) -> Option<CorpusFile> {
    corpus().into_iter().find(|f| f.name == name || f.name.trim_end_matches(".tm") == name)
}
