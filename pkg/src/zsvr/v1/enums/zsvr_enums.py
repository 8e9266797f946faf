from enum import Enum, unique


class ZsvrEnum(Enum):
    """Enum base whose lookups return None instead of raising on unknown keys."""

    @classmethod
    def from_name_get_enum(cls, name_str: str):
        return cls.__members__.get(name_str)

    @classmethod
    def from_attribute_get_enum(cls, attribute_str: str):
        return next((member for member in cls if member.value == attribute_str), None)


@unique
class ZsvrBlockKindEnum(ZsvrEnum):
    DOWN = "Down"
    UP = "Up"


@unique
class ZsvrCorrespondenceEnum(ZsvrEnum):
    FLOW = "Flow"
    COSINE = "Cos"


@unique
class ZsvrStageEnum(ZsvrEnum):
    EARLY = "E"
    MID = "M"
    LATE = "L"

    @classmethod
    def from_stage_string(cls, stages: str) -> list:
        """'EML' -> [EARLY, MID, LATE]; '' or 'none' -> []."""
        if stages is None or stages.strip().lower() in ("", "none", "-"):
            return []
        found = []
        for char in stages.strip().upper():
            member = cls.from_attribute_get_enum(char)
            if member is None:
                raise ValueError(f"Unknown stage letter: {char}")
            if member not in found:
                found.append(member)
        return found


@unique
class ZsvrCommandEnum(ZsvrEnum):
    FLOW = "flow"
    RESTORE = "restore"
    METRICS = "metrics"
    ABLATE = "ablate"
    DEMO = "demo"
