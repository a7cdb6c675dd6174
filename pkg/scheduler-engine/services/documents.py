"""
实例文档模块
JSON 实例文档的 pydantic 模型、解析（错误定位到行列或字段路径）与序列化
"""

import json
from pathlib import Path
from typing import Annotated, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, StrictInt, ValidationError, model_validator

from services.core import Criterion, CriterionKind, Instance, Job
from services.errors import DocumentError, SchedulingError
from utils.logger import setup_logger

logger = setup_logger(__name__)

PositiveInt = Annotated[StrictInt, Field(ge=1)]
NonNegativeInt = Annotated[StrictInt, Field(ge=0)]


class CriterionSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: CriterionKind
    bound: NonNegativeInt


class CriteriaSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    agent1: CriterionSpec
    agent2: CriterionSpec


class JobSpec(BaseModel):
    """作业：p 必填，w 默认 1，d 可选；id 缺省时取所在位置"""

    model_config = ConfigDict(extra="forbid")

    p: PositiveInt
    w: PositiveInt = 1
    d: Optional[PositiveInt] = None
    id: Optional[NonNegativeInt] = None


class InstanceDocument(BaseModel):
    """实例文档；expected 为生成时附带的已知答案"""

    model_config = ConfigDict(extra="forbid")

    id: Optional[str] = None
    criteria: CriteriaSpec
    jobs1: List[JobSpec] = Field(default_factory=list)
    jobs2: List[JobSpec] = Field(default_factory=list)
    expected: Optional[Literal["feasible", "infeasible"]] = None

    @model_validator(mode="after")
    def _check_due_dates(self) -> "InstanceDocument":
        for agent, spec, jobs in ((1, self.criteria.agent1, self.jobs1), (2, self.criteria.agent2, self.jobs2)):
            if not spec.kind.needs_due_date:
                continue
            for position, job in enumerate(jobs):
                if job.d is None:
                    raise ValueError(f"jobs{agent}[{position}].d: 准则 {spec.kind.value} 需要交期")
        return self

    def to_instance(self) -> Instance:
        """
        转换为领域实例

        Raises:
            DocumentError: 作业编号重复等结构问题
        """
        try:
            jobs1 = tuple(_to_job(spec, 1, i) for i, spec in enumerate(self.jobs1))
            jobs2 = tuple(_to_job(spec, 2, i) for i, spec in enumerate(self.jobs2))
            return Instance(
                jobs1, jobs2,
                Criterion(self.criteria.agent1.kind), Criterion(self.criteria.agent2.kind),
                self.criteria.agent1.bound, self.criteria.agent2.bound,
            )
        except SchedulingError as e:
            raise DocumentError(str(e)) from e

    @classmethod
    def from_instance(
        cls,
        instance: Instance,
        doc_id: Optional[str] = None,
        expected: Optional[str] = None,
    ) -> "InstanceDocument":
        return cls(
            id=doc_id,
            criteria=CriteriaSpec(
                agent1=CriterionSpec(kind=instance.crit1.kind, bound=instance.a1),
                agent2=CriterionSpec(kind=instance.crit2.kind, bound=instance.a2),
            ),
            jobs1=[_to_spec(job, i) for i, job in enumerate(instance.jobs1)],
            jobs2=[_to_spec(job, i) for i, job in enumerate(instance.jobs2)],
            expected=expected,
        )


def _to_job(spec: JobSpec, agent: int, position: int) -> Job:
    return Job(id=position if spec.id is None else spec.id, agent=agent, p=spec.p, w=spec.w, d=spec.d)


def _to_spec(job: Job, position: int) -> JobSpec:
    return JobSpec(p=job.p, w=job.w, d=job.d, id=None if job.id == position else job.id)


def _field_path(loc: Tuple[Union[str, int], ...]) -> str:
    path = ""
    for part in loc:
        if isinstance(part, int):
            path += f"[{part}]"
        else:
            path += f".{part}" if path else str(part)
    return path


def _validation_message(error: ValidationError) -> str:
    lines = []
    for item in error.errors():
        message = item["msg"]
        if message.startswith("Value error, "):
            message = message[len("Value error, "):]
        path = _field_path(tuple(item["loc"]))
        lines.append(f"{path}: {message}" if path else message)
    return "; ".join(lines)


def parse_document(text: str, source: str = "<document>") -> InstanceDocument:
    """
    解析实例文档文本

    Raises:
        DocumentError: JSON 语法错误（source:行:列）或字段校验失败（字段路径）
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(f"{source}:{e.lineno}:{e.colno}: {e.msg}") from e
    try:
        return InstanceDocument.model_validate(data)
    except ValidationError as e:
        raise DocumentError(f"{source}: {_validation_message(e)}") from e


def load_document(path: Union[str, Path]) -> InstanceDocument:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        logger.error(f"读取实例文档失败: {e}")
        raise DocumentError(f"{path}: 无法读取 ({e.strerror})") from e
    return parse_document(text, str(path))


def load_instance(path: Union[str, Path]) -> Tuple[InstanceDocument, Instance]:
    document = load_document(path)
    return document, document.to_instance()


def dump_document(document: InstanceDocument) -> str:
    """确定性的 JSON 文本（缩进 2，省略空字段）"""
    return document.model_dump_json(indent=2, exclude_none=True) + "\n"


def write_document(document: InstanceDocument, path: Union[str, Path]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_document(document), encoding="utf-8")


def load_corpus(directory: Union[str, Path]) -> List[Tuple[str, InstanceDocument]]:
    """
    读取目录下全部 *.json 文档，按文件名排序

    Returns:
        (实例编号, 文档) 列表；文档没有 id 时用文件名（不含扩展名）
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise DocumentError(f"{directory}: 不是目录")
    corpus = []
    for path in sorted(directory.glob("*.json")):
        document = load_document(path)
        corpus.append((document.id or path.stem, document))
    logger.info(f"从 {directory} 读取了 {len(corpus)} 个实例文档")
    return corpus
