from typing import Any, Dict, Optional

class BizError(Exception):
    """
    通用业务异常
    """
    exit_code: int = 1

    def __init__(
        self,
        message: str,
        code: int = 400,
        payload: Optional[Dict[str, Any]] = None
    ):
        self.message = message
        self.code = code
        self.payload = payload or {}
        super().__init__(self.message)


class InputError(BizError):
    """
    输入非法：非有限值、参数越界、文件格式错误
    """
    exit_code = 2

    def __init__(self, message: str, payload: Optional[Dict[str, Any]] = None):
        super().__init__(message=message, code=400, payload=payload)


class ContractError(BizError):
    """
    维度不一致 (A, Y, gamma)
    """
    exit_code = 2

    def __init__(self, message: str, payload: Optional[Dict[str, Any]] = None):
        super().__init__(message=message, code=422, payload=payload)


class ConvergenceError(BizError):
    """
    ADMM 或子问题未收敛，payload 携带诊断信息
    """
    exit_code = 3

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message=message, code=500, payload={"diagnostics": diagnostics or {}})

    @property
    def diagnostics(self) -> Dict[str, Any]:
        return self.payload.get("diagnostics", {})


class InternalError(BizError):
    """
    数值分解失败 (lambda > 0 时不应出现)
    """
    exit_code = 4

    def __init__(self, message: str, original_error: str = ""):
        super().__init__(
            message=message,
            code=500,
            payload={"original_error": str(original_error)}
        )
